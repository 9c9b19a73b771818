#ifndef CRITWAVE_IO_HPP
#define CRITWAVE_IO_HPP

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace critwave::io {

/// 12 significant digits, '.' decimal point, no grouping.
std::string format_number(double x);

/// Writes through a sibling temporary file and renames it into place, so a
/// failed producer never leaves a partial file behind.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& producer);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

/// Reads a numeric CSV with a header line.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable read_csv(std::istream& is);

}  // namespace critwave::io

#endif  // CRITWAVE_IO_HPP

#ifndef CRITWAVE_VERIFY_HPP
#define CRITWAVE_VERIFY_HPP

// The numerical pipeline behind N_t(1,0) > 0: the 16-row table built from
// φ_{ν₀}, the main inequality, the upper integral, C₁ and the push-up factor.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "critwave/profiles.hpp"

namespace critwave::verify {

inline constexpr double kNu0 = 1.86;
inline constexpr double kNu1 = 0.05;

struct Table1Row {
  int k;
  double z_lo;
  double z_hi;
  double y_k;       // φ^{-1}(z_lo)
  double lambda_k;
  double min_g;
  double product;   // ∏_{j<=k} (2λ_j - z_j)/(2λ_j - z_{j-1})
  double contribution;
};

struct Table1Summary {
  double nu0;
  double sup_phi;
  double y0;
  double kappa0;
  double g_minus;
  double total;
  double drift;
};

struct Table1 {
  std::vector<Table1Row> rows;
  Table1Summary summary;
};

/// Reference values printed in the source table (6 decimals).
struct ReferenceRow {
  double y_k, lambda_k, min_g, product, contribution;
};
const std::vector<ReferenceRow>& reference_rows();
Table1Summary reference_summary();

Table1 build_table1(double tol, double nu0 = kNu0);
Table1 build_table1(const SelfSimilarProfile& p);

struct ReportItem {
  std::string name;
  double computed = 0.0;
  std::optional<double> target;
  double tolerance = 0.0;
  std::string predicate;  // human-readable pass rule
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::vector<ReportItem> items;
  std::optional<Table1> table;  // absent when the table could not be built
  bool overall() const;
};

/// Σ_k contribution_k - g_-; passes iff positive.
ReportItem check_main_inequality(const std::vector<Table1Row>& rows,
                                 const Table1Summary& summary);

/// ∫₀¹ g(min{φ(y), z_max}) (1-y)^{-1/2} dy, or with the raw φ when !capped.
double upper_integral(const SelfSimilarProfile& p, bool capped = true,
                      double tol = 1e-10);
ReportItem check_upper_integral(const SelfSimilarProfile& p, double tol = 1e-10);

/// 2 Σ_{k=12}^{16} m_k (P_k - P_{k-1}) with P restarted at row 12.
double compute_C1(const std::vector<Table1Row>& rows);
/// Σ_{k<=11} 2 contribution_k - 2 g_-.
double neutralization_margin(const std::vector<Table1Row>& rows,
                             const Table1Summary& summary);
/// C₁ value, C₁/3 > 11ν₁/10, neutralization.
std::vector<ReportItem> check_C1(const Table1& table);

/// ∫₀^{8/9} (1-y)^{-1/2} φ_*(y) dy from the integrated linear profile, or
/// from the closed form.
double pushup_integral(const LinearProfile& lin, double tol = 1e-10);
double pushup_integral_exact(double tol = 1e-12);
/// I_*, (99/50) I_* > 11/10, closed-form agreement.
std::vector<ReportItem> check_pushup(double ode_tol, double tol = 1e-10);

struct RunOptions {
  double tol = 1e-10;  // ODE tolerance
  double nu0 = kNu0;
  int jobs = 1;
};

/// Every check in a fixed order; failures inside a check are recorded as
/// failing items, never thrown.
VerificationReport run_all(const RunOptions& opt = {});

/// CSV columns: k,range,y_k,lambda_k,min_g,product,contribution.
void write_table_csv(std::ostream& os, const Table1& t);
/// Deterministic JSON: identical reports give byte-identical text.
std::string report_json(const VerificationReport& r);

}  // namespace critwave::verify

#endif  // CRITWAVE_VERIFY_HPP

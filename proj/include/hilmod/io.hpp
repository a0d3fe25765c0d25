#ifndef HILMOD_IO_HPP
#define HILMOD_IO_HPP

#include <string>

#include "hilmod/bundle_geometry.hpp"
#include "hilmod/localization.hpp"
#include "hilmod/model_theory.hpp"
#include "hilmod/shift_analysis.hpp"

namespace hilmod::io {

/// Decimal formatting with a fixed number of significant digits; no
/// locale dependence, so equal inputs give byte-identical text.
std::string fmt_real(double x, int digits);
double round_to_digits(double x, int digits);
std::string fmt_complex_pair(Complex z, int digits);  // "re,im"

/// Moment tables: {"variables": n, "moments": [{"index": [...], "value": v}],
/// "tail": "geometric"|"reject"}. Non-positive values reject the load.
MomentSequence moments_from_json(const std::string& text);

/// Closed-form shift descriptors such as {"kind":"bergman-power","m":2,"k":0}.
std::string shift_rule_to_json(const WeightedShift& s);
WeightedShift shift_from_json(const std::string& text);

/// Weight tables as CSV with columns (index, weight).
std::string weights_to_csv(const WeightedShift& s, int count, int digits);
WeightedShift weights_from_csv(const std::string& text);

std::string curvature_report_to_json(const CurvatureReport& report, int digits);

std::string hs_fit_to_json(const HilbertSamuelFit& fit);
std::string hs_dims_to_csv(const HilbertSamuelFit& fit);

/// Complex matrices: {"rows": [[{"re": x, "im": y}, ...], ...]}.
Eigen::MatrixXcd matrix_from_json(const std::string& text);
std::string matrix_to_json(const Eigen::MatrixXcd& m, int digits);

std::string read_file(const std::string& path);
/// Writes via a temp file in the same directory plus rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace hilmod::io

#endif

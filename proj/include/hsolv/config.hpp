#pragma once

#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hsolv {

// Numeric knobs shared across the library.  One instance flows from the
// front end into every pipeline stage and is echoed into reports, so a
// verdict can always be reproduced from its own output.
struct Config {
  // operator_algebra
  double monic_defect_tol = 1e-12;  // |coefficient defect| for the top symbol
  double root_gap_min = 1e-8;       // minimum pairwise root distance
  double root_xcheck_tol = 1e-9;    // relative disagreement between root methods

  // kernel numerics
  double window_t0 = 5.0;
  double window_T = 15.0;
  int grid_points = 600;
  double rk_rel_tol = 1e-10;
  double rk_abs_tol = 1e-12;
  double gamma_min = 1.0;        // validated |gamma| region starts here
  double re_thresh = 1e-8;       // decay-side classification threshold on Re(root)
  double sigma_tol = 1e-6;       // rank-deficiency threshold for jet matching
  double sigma_confirm = 1e-8;   // refinement confirmation threshold
  double wbound_slack = 10.0;    // slack factor on the w-trajectory norm bound

  // scans
  double scan_lo = 1.0;
  double scan_hi = 10.0;
  int scan_points = 33;

  // sector analysis
  double sector_half_angle = 3.14159265358979323846 / 16.0;

  static Config from_env() {
    Config c;
    if (const char* tol = std::getenv("HSOLV_TOL")) {
      c.sigma_tol = parse_positive(tol, "HSOLV_TOL");
    }
    if (const char* win = std::getenv("HSOLV_WINDOW")) {
      c.set_window(win, "HSOLV_WINDOW");
    }
    return c;
  }

  void set_window(const std::string& spec, const std::string& where) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument(where + ": expected \"t0:T\", got \"" + spec + "\"");
    }
    double t0 = parse_positive(spec.substr(0, colon), where);
    double T = parse_positive(spec.substr(colon + 1), where);
    if (!(t0 < T)) {
      throw std::invalid_argument(where + ": window needs t0 < T");
    }
    window_t0 = t0;
    window_T = T;
  }

 private:
  static double parse_positive(const std::string& s, const std::string& where) {
    std::istringstream in(s);
    double v = 0;
    if (!(in >> v) || !(in >> std::ws).eof() || !(v > 0)) {
      throw std::invalid_argument(where + ": expected a positive number, got \"" + s + "\"");
    }
    return v;
  }
};

// Error taxonomy: parse/validation problems and numerical failures map to
// distinct CLI exit codes, so they stay distinct exception types here.
struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hsolv

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ptsr/io.hpp"

namespace ptsr::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,         ///< bad arguments or unparsable input
    kData = 2,          ///< input violates the model's requirements
    kNotConverged = 3,  ///< fit finished without meeting the gradient tolerance
    kNumeric = 4,       ///< filter blow-up, singular design or information matrix
};

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/**
 * Human-readable fit summary, numbers rounded to 6 significant digits.
 * `restriction` is an optional hypothesis in the inference grammar ("ar1 = 0; ma1 = 0").
 */
std::string fit_report(const io::FitArchive& archive, const io::Dataset& data, double level = 0.95,
                       const std::optional<std::string>& restriction = std::nullopt);

/// Residual diagnostics as JSON. ACF up to `max_lag`; Ljung-Box at 5, 10, 15 where defined.
std::string diagnostics_json(const io::FitArchive& archive, const io::Dataset& data, std::size_t max_lag);

}  // namespace ptsr::cli

#pragma once

// File formats for the command-line tool: CSV data, model configs and fit archives.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptsr/estimator.hpp"
#include "ptsr/model.hpp"

namespace ptsr::io {

/// Malformed input text (CSV syntax, config keys, archive layout).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input whose values violate the model's requirements.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric table with a header row. Data rows are numbered from 1 in messages.
struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;  ///< rows x header.size()

    /// Column index by name; throws ParseError if absent.
    [[nodiscard]] Eigen::Index column(const std::string& name) const;
};

/// Comma separated, '.' decimals, first line is the header. Blank lines are skipped.
CsvTable read_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);

/// Writes a header and rows; numbers in shortest round-trip form.
void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows);

struct ModelConfig {
    ModelSpec spec;
    std::string response = "y";
    std::vector<std::string> covariates;
    FitOptions options;
};

/**
 * Flat key = value file, '#' starts a comment. Keys:
 *   distribution, link_g1, link_g2, p, q, response, covariates (comma list),
 *   include_x_in_ar, max_iterations, g_tol, step_tol.
 * Unknown or repeated keys are rejected.
 */
ModelConfig parse_config(std::istream& in, const std::string& source = "<config>");
ModelConfig read_config(const std::filesystem::path& path);
std::string format_config(const ModelConfig& config);

struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
};

/// Selects the response and covariates named by the config; DataError on a value <= 0 in the response.
Dataset extract(const CsvTable& table, const ModelConfig& config);

struct Fingerprint {
    std::size_t rows = 0;
    std::uint64_t hash = 0;  ///< FNV-1a over the bytes of y then x, column by column

    bool operator==(const Fingerprint&) const = default;
};

Fingerprint fingerprint(const Dataset& data);

struct FitArchive {
    ModelConfig config;
    FitResult fit;
    Fingerprint data;
    std::string data_path;  ///< as given when fitting; used when no data file is supplied later
};

std::string to_json(const FitArchive& archive);
FitArchive archive_from_json(const std::string& text);

void save_archive(const FitArchive& archive, const std::filesystem::path& path);
FitArchive load_archive(const std::filesystem::path& path);

/// Parses "alpha=0.2, beta1=0.5, ..." naming every parameter of the spec exactly once.
ParameterVector parse_parameters(const std::string& text, const ModelSpec& spec);

}  // namespace ptsr::io

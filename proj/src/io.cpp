#include "ptsr/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ptsr::io {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

/// Strips one pair of surrounding double quotes.
std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::optional<double> to_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

Eigen::Index CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("column '" + name + "' not found in the data header");
    return static_cast<Eigen::Index>(it - header.begin());
}

CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError(source + ": no header row");
    for (std::string_view field : split(line, ',')) {
        field = unquote(field);
        if (field.empty()) throw ParseError(source + ": empty column name in header");
        if (std::find(table.header.begin(), table.header.end(), field) != table.header.end()) {
            throw ParseError(source + ": duplicate column '" + std::string(field) + "'");
        }
        table.header.emplace_back(field);
    }
    const std::size_t cols = table.header.size();

    std::vector<double> buffer;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++rows;
        const auto fields = split(line, ',');
        if (fields.size() != cols) {
            throw ParseError(fmt::format("{}: row {} (line {}): expected {} fields, found {}", source, rows, line_no,
                                         cols, fields.size()));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            const std::string_view field = unquote(fields[j]);
            if (field.empty()) {
                throw ParseError(fmt::format("{}: row {} (line {}), column '{}': missing value", source, rows,
                                             line_no, table.header[j]));
            }
            const auto v = to_double(field);
            if (!v || !std::isfinite(*v)) {
                throw ParseError(fmt::format("{}: row {} (line {}), column '{}': '{}' is not a finite number",
                                             source, rows, line_no, table.header[j], field));
            }
            buffer.push_back(*v);
        }
    }
    table.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        buffer.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows) {
    std::string text;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j > 0) text += ',';
        text += header[j];
    }
    text += '\n';
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            if (j > 0) text += ',';
            text += fmt::format("{}", rows(i, j));
        }
        text += '\n';
    }
    out << text;
}

ModelConfig parse_config(std::istream& in, const std::string& source) {
    ModelConfig config;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& what) { throw ParseError(fmt::format("{}:{}: {}", source, line_no, what)); };
    auto integer = [&](std::string_view v, long lo) -> long {
        long out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || out < lo) {
            fail("expected an integer >= " + std::to_string(lo) + ", got '" + std::string(v) + "'");
        }
        return out;
    };
    auto real = [&](std::string_view v) -> double {
        const auto d = to_double(v);
        if (!d || !(*d > 0.0) || !std::isfinite(*d)) fail("expected a positive number, got '" + std::string(v) + "'");
        return *d;
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        const std::string key(trim(text.substr(0, eq)));
        const std::string_view value = unquote(trim(text.substr(eq + 1)));
        if (!seen.insert(key).second) fail("repeated key '" + key + "'");

        try {
            if (key == "distribution") {
                config.spec.family = parse_distribution(value);
            } else if (key == "link_g1") {
                config.spec.g1 = parse_link(value);
            } else if (key == "link_g2") {
                config.spec.g2 = parse_link(value);
            } else if (key == "p") {
                config.spec.p = static_cast<std::size_t>(integer(value, 0));
            } else if (key == "q") {
                config.spec.q = static_cast<std::size_t>(integer(value, 0));
            } else if (key == "response") {
                if (value.empty()) fail("empty response name");
                config.response = std::string(value);
            } else if (key == "covariates") {
                config.covariates.clear();
                if (!value.empty()) {
                    for (std::string_view c : split(value, ',')) {
                        if (c.empty()) fail("empty covariate name");
                        config.covariates.emplace_back(c);
                    }
                }
            } else if (key == "include_x_in_ar") {
                if (value == "true" || value == "1") {
                    config.spec.include_x_in_ar = true;
                } else if (value == "false" || value == "0") {
                    config.spec.include_x_in_ar = false;
                } else {
                    fail("include_x_in_ar must be true or false");
                }
            } else if (key == "max_iterations") {
                config.options.max_iterations = static_cast<int>(integer(value, 1));
            } else if (key == "g_tol") {
                config.options.gradient_tolerance = real(value);
            } else if (key == "step_tol") {
                config.options.step_tolerance = real(value);
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    config.spec.s = config.covariates.size();
    std::set<std::string> unique(config.covariates.begin(), config.covariates.end());
    if (unique.size() != config.covariates.size()) throw ParseError(source + ": repeated covariate name");
    if (unique.count(config.response)) throw ParseError(source + ": the response is also listed as a covariate");
    return config;
}

ModelConfig read_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_config(in, path.string());
}

std::string format_config(const ModelConfig& c) {
    std::string covariates;
    for (std::size_t i = 0; i < c.covariates.size(); ++i) covariates += (i ? "," : "") + c.covariates[i];
    return fmt::format(
        "distribution = {}\nlink_g1 = {}\nlink_g2 = {}\np = {}\nq = {}\nresponse = {}\ncovariates = {}\n"
        "include_x_in_ar = {}\nmax_iterations = {}\ng_tol = {}\nstep_tol = {}\n",
        c.spec.family.name(), c.spec.g1.name(), c.spec.g2.name(), c.spec.p, c.spec.q, c.response, covariates,
        c.spec.include_x_in_ar, c.options.max_iterations, c.options.gradient_tolerance, c.options.step_tolerance);
}

Dataset extract(const CsvTable& table, const ModelConfig& config) {
    Dataset d;
    const Eigen::Index yc = table.column(config.response);
    d.y = table.values.col(yc);
    for (Eigen::Index t = 0; t < d.y.size(); ++t) {
        if (!(d.y[t] > 0.0)) {
            throw DataError(fmt::format("row {}: response '{}' must be > 0, got {}", t + 1, config.response, d.y[t]));
        }
    }
    d.x.resize(table.values.rows(), static_cast<Eigen::Index>(config.covariates.size()));
    for (std::size_t j = 0; j < config.covariates.size(); ++j) {
        d.x.col(static_cast<Eigen::Index>(j)) = table.values.col(table.column(config.covariates[j]));
    }
    return d;
}

Fingerprint fingerprint(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const double* p, Eigen::Index count) {
        for (Eigen::Index i = 0; i < count; ++i) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, p + i, sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
    };
    mix(data.y.data(), data.y.size());
    mix(data.x.data(), data.x.size());  // column-major
    return {static_cast<std::size_t>(data.y.size()), h};
}

// ---- archive ------------------------------------------------------------

namespace {

constexpr int kArchiveVersion = 1;

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (double x : v) out.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

Eigen::VectorXd vector_from(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] =
            j[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ParseError("archive: ragged matrix");
        m.row(i) = vector_from(j[i]).transpose();
    }
    return m;
}

}  // namespace

std::string to_json(const FitArchive& a) {
    const ModelConfig& c = a.config;
    const FitResult& f = a.fit;
    json j;
    j["format"] = "ptsr-fit";
    j["version"] = kArchiveVersion;
    j["config"] = {{"distribution", c.spec.family.name()},
                   {"link_g1", c.spec.g1.name()},
                   {"link_g2", c.spec.g2.name()},
                   {"p", c.spec.p},
                   {"q", c.spec.q},
                   {"response", c.response},
                   {"covariates", c.covariates},
                   {"include_x_in_ar", c.spec.include_x_in_ar},
                   {"max_iterations", c.options.max_iterations},
                   {"g_tol", c.options.gradient_tolerance},
                   {"step_tol", c.options.step_tolerance}};
    j["data"] = {{"path", a.data_path}, {"rows", a.data.rows}, {"hash", fmt::format("{:016x}", a.data.hash)}};
    j["fit"] = {{"estimate",
                 {{"alpha", f.estimate.alpha},
                  {"beta", vector_json(f.estimate.beta)},
                  {"ar", vector_json(f.estimate.ar)},
                  {"ma", vector_json(f.estimate.ma)},
                  {"dispersion", f.estimate.dispersion}}},
                {"loglik", f.loglik},
                {"information", matrix_json(f.information)},
                {"vcov", f.vcov ? matrix_json(*f.vcov) : json(nullptr)},
                {"std_errors", vector_json(f.std_errors)},
                {"converged", f.converged},
                {"iterations", f.iterations},
                {"n", f.n},
                {"score_norm", f.score_norm},
                {"message", f.message}};
    return j.dump(2) + "\n";
}

FitArchive archive_from_json(const std::string& text) {
    FitArchive a;
    try {
        const json j = json::parse(text);
        if (j.at("format") != "ptsr-fit") throw ParseError("archive: not a ptsr fit archive");
        if (j.at("version") != kArchiveVersion) throw ParseError("archive: unsupported version");

        const json& c = j.at("config");
        ModelConfig& config = a.config;
        config.spec.family = parse_distribution(c.at("distribution").get<std::string>());
        config.spec.g1 = parse_link(c.at("link_g1").get<std::string>());
        config.spec.g2 = parse_link(c.at("link_g2").get<std::string>());
        config.spec.p = c.at("p").get<std::size_t>();
        config.spec.q = c.at("q").get<std::size_t>();
        config.response = c.at("response").get<std::string>();
        config.covariates = c.at("covariates").get<std::vector<std::string>>();
        config.spec.s = config.covariates.size();
        config.spec.include_x_in_ar = c.at("include_x_in_ar").get<bool>();
        config.options.max_iterations = c.at("max_iterations").get<int>();
        config.options.gradient_tolerance = c.at("g_tol").get<double>();
        config.options.step_tolerance = c.at("step_tol").get<double>();

        const json& d = j.at("data");
        a.data_path = d.at("path").get<std::string>();
        a.data.rows = d.at("rows").get<std::size_t>();
        a.data.hash = std::stoull(d.at("hash").get<std::string>(), nullptr, 16);

        const json& f = j.at("fit");
        const json& e = f.at("estimate");
        FitResult& fit = a.fit;
        fit.estimate.alpha = e.at("alpha").get<double>();
        fit.estimate.beta = vector_from(e.at("beta"));
        fit.estimate.ar = vector_from(e.at("ar"));
        fit.estimate.ma = vector_from(e.at("ma"));
        fit.estimate.dispersion = e.at("dispersion").get<double>();
        fit.estimate.check(config.spec);
        fit.loglik = f.at("loglik").get<double>();
        fit.information = matrix_from(f.at("information"));
        if (!f.at("vcov").is_null()) fit.vcov = matrix_from(f.at("vcov"));
        fit.std_errors = vector_from(f.at("std_errors"));
        fit.converged = f.at("converged").get<bool>();
        fit.iterations = f.at("iterations").get<int>();
        fit.n = f.at("n").get<std::size_t>();
        fit.score_norm = f.at("score_norm").get<double>();
        fit.message = f.at("message").get<std::string>();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("archive: ") + e.what());
    }
    return a;
}

void save_archive(const FitArchive& archive, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << to_json(archive);
}

FitArchive load_archive(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream text;
    text << in.rdbuf();
    return archive_from_json(text.str());
}

ParameterVector parse_parameters(const std::string& text, const ModelSpec& spec) {
    const std::vector<std::string> names = spec.parameter_names();
    std::map<std::string, double> given;
    for (std::string_view item : split(text, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("parameters: expected name=value, got '" + std::string(item) + "'");
        const std::string name(trim(item.substr(0, eq)));
        const auto v = to_double(trim(item.substr(eq + 1)));
        if (!v) throw ParseError("parameters: bad value for '" + name + "'");
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw ParseError("parameters: unknown parameter '" + name + "'");
        }
        if (!given.emplace(name, *v).second) throw ParseError("parameters: '" + name + "' given twice");
    }
    Eigen::VectorXd flat(static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto it = given.find(names[i]);
        if (it == given.end()) throw ParseError("parameters: missing '" + names[i] + "'");
        flat[static_cast<Eigen::Index>(i)] = it->second;
    }
    ParameterVector g = ParameterVector::from_flat(spec, flat);
    try {
        g.check(spec);
    } catch (const std::exception& e) {
        throw DataError(std::string("parameters: ") + e.what());
    }
    return g;
}

}  // namespace ptsr::io

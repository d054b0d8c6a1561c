#include "ptsr/cli.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptsr/diagnostics.hpp"
#include "ptsr/errors.hpp"
#include "ptsr/estimator.hpp"
#include "ptsr/forecast.hpp"
#include "ptsr/inference.hpp"
#include "ptsr/simulate.hpp"

namespace ptsr::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kReportLags[] = {5, 10, 15};

std::string num(double v) {
    if (std::isnan(v)) return "NA";
    return fmt::format("{:.6g}", v);
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

/// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& text, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw io::ParseError("cannot write '" + path + "'");
    file << text;
}

io::Dataset load_data(const std::string& path, const io::ModelConfig& config) {
    return io::extract(io::read_csv(path), config);
}

/// Data for a saved fit: the explicit file if given, else the one recorded in the archive.
io::Dataset archived_data(const io::FitArchive& archive, const std::string& explicit_path, std::ostream& err) {
    const std::string path = explicit_path.empty() ? archive.data_path : explicit_path;
    if (path.empty()) throw io::ParseError("no data file: pass --data");
    io::Dataset data = load_data(path, archive.config);
    if (io::fingerprint(data) != archive.data) {
        err << "warning: data in '" << path << "' differ from the data the model was fitted to\n";
    }
    return data;
}

std::vector<LjungBoxResult> report_ljung_box(const Eigen::VectorXd& r, std::size_t fitted_df,
                                             std::vector<std::size_t>& lags_used) {
    std::vector<LjungBoxResult> out;
    for (std::size_t lags : kReportLags) {
        if (lags <= fitted_df || lags >= static_cast<std::size_t>(r.size())) continue;
        try {
            out.push_back(ljung_box(r, lags, fitted_df));
            lags_used.push_back(lags);
        } catch (const DomainError&) {
            // constant residuals: no autocorrelation defined
        }
    }
    return out;
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
    std::string data, config, out, report, restrict;
    double level = 0.95;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.level > 0.5 && a.level < 1.0)) throw io::ParseError("--level must lie in (0.5, 1)");
    io::FitArchive archive;
    archive.config = io::read_config(a.config);
    if (!a.restrict.empty()) {
        try {
            parse_restriction(a.restrict, archive.config.spec.parameter_names());
        } catch (const std::invalid_argument& e) {
            throw io::ParseError(std::string("--restrict: ") + e.what());
        }
    }
    const io::Dataset data = load_data(a.data, archive.config);
    archive.data = io::fingerprint(data);
    archive.data_path = std::filesystem::absolute(a.data).lexically_normal().string();
    archive.fit = fit(archive.config.spec, data.y, data.x, archive.config.options);

    if (!a.out.empty()) io::save_archive(archive, a.out);
    std::optional<std::string> restriction;
    if (!a.restrict.empty()) restriction = a.restrict;
    emit(fit_report(archive, data, a.level, restriction), a.report, out);
    if (!archive.fit.converged) {
        err << "warning: the fit did not converge (" << archive.fit.message << ")\n";
        return kNotConverged;
    }
    return kOk;
}

// ---- forecast -------------------------------------------------------------

struct ForecastArgs {
    std::string archive, data, future, out;
    std::size_t horizon = 1;
};

int cmd_forecast(const ForecastArgs& a, std::ostream& out, std::ostream& err) {
    const io::FitArchive archive = io::load_archive(a.archive);
    const io::Dataset data = archived_data(archive, a.data, err);
    const ModelSpec& spec = archive.config.spec;

    Eigen::MatrixXd future(0, static_cast<Eigen::Index>(spec.s));
    if (spec.s > 0) {
        if (a.future.empty()) throw io::DataError("the model has covariates: pass --future with their future values");
        const io::CsvTable table = io::read_csv(a.future);
        if (table.values.rows() < static_cast<Eigen::Index>(a.horizon)) {
            throw io::DataError(fmt::format("--future has {} rows, the horizon needs {}", table.values.rows(),
                                            a.horizon));
        }
        future.resize(table.values.rows(), static_cast<Eigen::Index>(spec.s));
        for (std::size_t j = 0; j < spec.s; ++j) {
            future.col(static_cast<Eigen::Index>(j)) = table.values.col(table.column(archive.config.covariates[j]));
        }
    } else if (!a.future.empty()) {
        throw io::DataError("the model has no covariates: --future is not allowed");
    }

    const ForecastResult f = forecast(archive.fit, spec, data.y, data.x, future, a.horizon);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(a.horizon), 2);
    for (Eigen::Index j = 0; j < rows.rows(); ++j) {
        rows(j, 0) = static_cast<double>(j + 1);
        rows(j, 1) = f.predicted[j];
    }
    std::ostringstream text;
    io::write_csv(text, {"step", "mu_hat"}, rows);
    emit(text.str(), a.out, out);
    return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string config, params, out;
    std::size_t n = 0;
    std::size_t burn_in = 500;
    std::uint64_t seed = 0;
    bool with_mu = false;
    std::size_t replicates = 0;
    unsigned jobs = 1;
};

/// One row per replicate: simulate with seed + r, then fit.
std::string monte_carlo(const io::ModelConfig& config, const ParameterVector& gamma, const SimulateArgs& a) {
    const ModelSpec& spec = config.spec;
    const std::vector<std::string> names = spec.parameter_names();
    const auto k = static_cast<Eigen::Index>(names.size());
    Eigen::MatrixXd rows = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(a.replicates), 5 + 2 * k,
                                                     std::numeric_limits<double>::quiet_NaN());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < a.replicates; r = next++) {
            const auto i = static_cast<Eigen::Index>(r);
            const std::uint64_t seed = a.seed + r;
            rows(i, 0) = static_cast<double>(r + 1);
            rows(i, 1) = static_cast<double>(seed);
            rows(i, 2) = 0.0;
            try {
                const SimulationResult d = simulate({spec, gamma, a.n, a.burn_in, std::nullopt, seed});
                const FitResult f = fit(spec, d.y, d.x, config.options);
                rows(i, 2) = f.converged ? 1.0 : 0.0;
                rows(i, 3) = f.iterations;
                rows(i, 4) = f.loglik;
                rows.block(i, 5, 1, k) = f.estimate.flat().transpose();
                rows.block(i, 5 + k, 1, k) = f.std_errors.transpose();
            } catch (const std::exception&) {
                // left as a failed replicate
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(a.replicates)));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<std::string> header = {"replicate", "seed", "converged", "iterations", "loglik"};
    for (const auto& nm : names) header.push_back("est_" + nm);
    for (const auto& nm : names) header.push_back("se_" + nm);
    std::ostringstream text;
    io::write_csv(text, header, rows);
    return text.str();
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const io::ModelConfig config = io::read_config(a.config);
    const ParameterVector gamma = io::parse_parameters(a.params, config.spec);
    if (a.n < 1) throw io::ParseError("--n must be >= 1");
    if (a.replicates > 0) {
        emit(monte_carlo(config, gamma, a), a.out, out);
        return kOk;
    }

    const SimulationResult d = simulate({config.spec, gamma, a.n, a.burn_in, std::nullopt, a.seed});
    const auto n = static_cast<Eigen::Index>(a.n);
    const auto s = static_cast<Eigen::Index>(config.spec.s);
    Eigen::MatrixXd rows(n, 2 + s + (a.with_mu ? 1 : 0));
    rows.col(0) = Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
    rows.col(1) = d.y;
    rows.middleCols(2, s) = d.x;
    if (a.with_mu) rows.col(2 + s) = d.mu;

    std::vector<std::string> header = {"t", config.response};
    header.insert(header.end(), config.covariates.begin(), config.covariates.end());
    if (a.with_mu) header.emplace_back("mu_true");
    std::ostringstream text;
    io::write_csv(text, header, rows);
    emit(text.str(), a.out, out);
    return kOk;
}

// ---- diagnose -------------------------------------------------------------

struct DiagnoseArgs {
    std::string archive, data, out;
    std::size_t lags = 20;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
    const io::FitArchive archive = io::load_archive(a.archive);
    const io::Dataset data = archived_data(archive, a.data, err);
    emit(diagnostics_json(archive, data, a.lags), a.out, out);
    return kOk;
}

}  // namespace

std::string fit_report(const io::FitArchive& archive, const io::Dataset& data, double level,
                       const std::optional<std::string>& restriction) {
    const ModelSpec& spec = archive.config.spec;
    const FitResult& f = archive.fit;
    const std::vector<std::string> names = spec.parameter_names();
    const Eigen::VectorXd est = f.estimate.flat();
    std::string r;

    r += "Positive time series regression\n";
    r += fmt::format("  family: {}, links: g1 = {}, g2 = {}\n", spec.family.name(), spec.g1.name(), spec.g2.name());
    r += fmt::format("  response: {}, covariates: {}\n", archive.config.response,
                     spec.s > 0 ? join(archive.config.covariates, ", ") : "none");
    r += fmt::format("  p = {}, q = {}, covariates in AR terms: {}\n", spec.p, spec.q,
                     spec.x_in_ar_active() ? "yes" : "no");
    r += fmt::format("  observations: {}\n\n", f.n);

    const std::string pct = fmt::format("{:.6g}%", 100.0 * level);
    r += fmt::format("{:<12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "parameter", "estimate", "std.error",
                     "z", "p-value", "lower " + pct, "upper " + pct);
    for (std::size_t i = 0; i < names.size(); ++i) {
        double z = std::numeric_limits<double>::quiet_NaN(), p = z, lo = z, hi = z;
        if (f.vcov) {
            const ZTest t = z_statistic(f, i, 0.0);
            const Interval ci = confidence_interval(f, i, level);
            z = t.z;
            p = t.p_value;
            lo = ci.lower;
            hi = ci.upper;
        }
        r += fmt::format("{:<12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n", names[i],
                         num(est[static_cast<Eigen::Index>(i)]), num(f.std_errors[static_cast<Eigen::Index>(i)]),
                         num(z), num(p), num(lo), num(hi));
    }
    if (!f.vcov) r += "  (information matrix not positive definite: no standard errors)\n";

    const std::size_t k = spec.parameter_count();
    const InformationCriteria ic = information_criteria(f.loglik, k, static_cast<double>(f.n));
    r += fmt::format("\nlog-likelihood: {}\n", num(f.loglik));
    r += fmt::format("AIC: {}  SIC: {}  HQ: {}\n", num(ic.aic), num(ic.sic), num(ic.hq));

    const ResidualSet res = residuals(f, spec, data.y, data.x);
    std::vector<std::size_t> lags;
    const auto lb = report_ljung_box(res.quantile, spec.p + spec.q, lags);
    r += fmt::format("\nLjung-Box test on quantile residuals (df = lags - {})\n", spec.p + spec.q);
    r += fmt::format("{:>6} {:>12} {:>4} {:>12}\n", "lags", "statistic", "df", "p-value");
    for (std::size_t i = 0; i < lb.size(); ++i) {
        r += fmt::format("{:>6} {:>12} {:>4} {:>12}\n", lags[i], num(lb[i].statistic), lb[i].df, num(lb[i].p_value));
    }
    if (res.clipped > 0) r += fmt::format("  ({} residuals clipped at the CDF bounds)\n", res.clipped);

    if (restriction) {
        r += fmt::format("\nWald test of {}\n", *restriction);
        if (f.vcov) {
            const WaldTest w = wald_test(f, parse_restriction(*restriction, names));
            r += fmt::format("  W = {}, df = {}, p-value = {}\n", num(w.statistic), w.df, num(w.p_value));
        } else {
            r += "  unavailable without a covariance matrix\n";
        }
    }

    r += fmt::format("\nconverged: {} ({}), iterations: {}, max |score|: {}\n", f.converged ? "yes" : "no",
                     f.message, f.iterations, num(f.score_norm));
    return r;
}

std::string diagnostics_json(const io::FitArchive& archive, const io::Dataset& data, std::size_t max_lag) {
    const ModelSpec& spec = archive.config.spec;
    const FitResult& f = archive.fit;
    const ResidualSet res = residuals(f, spec, data.y, data.x);
    const std::size_t m = spec.mean_parameter_count();
    const InformationCriteria ic = information_criteria(f.loglik, spec.parameter_count(), static_cast<double>(f.n));

    auto as_array = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    json j;
    j["n"] = f.n;
    j["loglik"] = f.loglik;
    j["criteria"] = {{"aic", ic.aic}, {"sic", ic.sic}, {"hq", ic.hq}, {"parameters", spec.parameter_count()}};
    j["residuals"] = {{"simple", as_array(res.simple)}, {"quantile", as_array(res.quantile)}, {"clipped", res.clipped}};

    const AcfResult a = acf(res.quantile, max_lag, m);
    j["acf"] = {{"series", "quantile"}, {"values", as_array(a.values)}, {"band", a.band}, {"mean_parameters", m}};

    std::vector<std::size_t> lags;
    const auto lb = report_ljung_box(res.quantile, spec.p + spec.q, lags);
    j["ljung_box"] = json::array();
    for (std::size_t i = 0; i < lb.size(); ++i) {
        j["ljung_box"].push_back(
            {{"lags", lags[i]}, {"statistic", lb[i].statistic}, {"df", lb[i].df}, {"p_value", lb[i].p_value}});
    }
    const KsResult ks = ks_normality(res.quantile);
    j["ks_normality"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}};
    return j.dump(2) + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Positive time series regression: fit, forecast, simulate, diagnose", "ptsr"};
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "estimate a model and print a report");
    fit_cmd->add_option("--data", fa.data, "CSV with a header row")->required();
    fit_cmd->add_option("--config", fa.config, "model config file")->required();
    fit_cmd->add_option("--out", fa.out, "write the fit archive (JSON) here");
    fit_cmd->add_option("--report", fa.report, "write the report here instead of stdout");
    fit_cmd->add_option("--level", fa.level, "confidence level of the intervals")->capture_default_str();
    fit_cmd->add_option("--restrict", fa.restrict, "Wald test, e.g. \"ar1 = 0; ma1 = 0\"");

    ForecastArgs fc;
    auto* forecast_cmd = app.add_subcommand("forecast", "mean forecasts from a saved fit");
    forecast_cmd->add_option("--fit", fc.archive, "fit archive")->required();
    forecast_cmd->add_option("--horizon", fc.horizon, "steps ahead")->required()->check(CLI::PositiveNumber);
    forecast_cmd->add_option("--data", fc.data, "data file (default: the one recorded in the archive)");
    forecast_cmd->add_option("--future", fc.future, "CSV with future covariate values");
    forecast_cmd->add_option("--out", fc.out, "output CSV (default stdout)");

    SimulateArgs sa;
    auto* simulate_cmd = app.add_subcommand("simulate", "draw a series from a model");
    simulate_cmd->add_option("--config", sa.config, "model config file")->required();
    simulate_cmd->add_option("--params", sa.params, "\"alpha=..,beta1=..,ar1=..,ma1=..,dispersion=..\"")->required();
    simulate_cmd->add_option("--n", sa.n, "series length")->required();
    simulate_cmd->add_option("--seed", sa.seed, "random seed")->capture_default_str();
    simulate_cmd->add_option("--burn-in", sa.burn_in, "discarded initial steps")->capture_default_str();
    simulate_cmd->add_flag("--mu", sa.with_mu, "add the true conditional means as column mu_true");
    simulate_cmd->add_option("--replicates", sa.replicates, "simulate and fit R series, one CSV row each");
    simulate_cmd->add_option("--jobs", sa.jobs, "threads for --replicates")->capture_default_str();
    simulate_cmd->add_option("--out", sa.out, "output CSV (default stdout)");

    DiagnoseArgs da;
    auto* diagnose_cmd = app.add_subcommand("diagnose", "residual diagnostics of a saved fit as JSON");
    diagnose_cmd->add_option("--fit", da.archive, "fit archive")->required();
    diagnose_cmd->add_option("--data", da.data, "data file (default: the one recorded in the archive)");
    diagnose_cmd->add_option("--lags", da.lags, "largest ACF lag")->capture_default_str()->check(CLI::PositiveNumber);
    diagnose_cmd->add_option("--out", da.out, "output JSON (default stdout)");

    std::vector<std::string> storage = {"ptsr"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fa, out, err);
        if (*forecast_cmd) return cmd_forecast(fc, out, err);
        if (*simulate_cmd) return cmd_simulate(sa, out);
        if (*diagnose_cmd) return cmd_diagnose(da, out, err);
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const io::DataError& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const RangeError& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const SingularMatrixError& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        // too few observations for the model, mismatched dimensions
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kUsage;
}

}  // namespace ptsr::cli

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "citesim/asymptotics.hpp"
#include "citesim/errors.hpp"
#include "citesim/inference.hpp"
#include "citesim/model_json.hpp"
#include "citesim/models.hpp"
#include "citesim/rng.hpp"
#include "citesim/sampler.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

// Everything is computed into a string first; files appear only on success.
void emit(const std::string& csv, const std::string& output, const json& meta) {
    if (output.empty()) {
        fmt::print("{}", csv);
        return;
    }
    {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", output));
        out << csv;
    }
    std::ofstream mf(output + ".meta.json", std::ios::binary);
    if (!mf) throw std::runtime_error(fmt::format("cannot write '{}.meta.json'", output));
    mf << meta.dump(2) << "\n";
}

json make_meta(const std::string& command, json options) {
    return json{{"command", command}, {"options", std::move(options)}, {"version", kVersion}};
}

std::int64_t default_threshold(const std::string& dataset) {
    if (dataset == "ex1" || dataset == "ex3") return 50;
    if (dataset == "ex2") return 30;
    if (dataset == "ex4") return 25;
    return 50;
}

struct PmfCmd {
    std::string model_json;
    int max_k = 128;
    std::string output;

    void run() const {
        const auto model = citesim::model_json::parse_model(model_json);
        const auto probs = citesim::models::pmf(model, max_k);
        std::string csv = "k,probability\n";
        for (std::size_t k = 0; k < probs.size(); ++k) {
            csv += fmt::format("{},{}\n", k, probs[k]);
        }
        emit(csv, output,
             make_meta("pmf", {{"model", json::parse(citesim::model_json::to_json(model))},
                               {"max_k", max_k}}));
    }
};

struct SampleCmd {
    std::string model_json;
    std::int64_t draws = 0;
    std::uint64_t seed = 0;
    int max_k = 4096;
    bool serial = false;
    std::string output;

    void run() const {
        const auto model = citesim::model_json::parse_model(model_json);
        citesim::sampling::BatchOptions options;
        options.max_k = max_k;
        options.parallel = !serial;
        const auto batch = citesim::sampling::sample_batch(model, draws, seed, options);
        std::string csv = "k,count\n";
        for (std::size_t k = 0; k < batch.counts.size(); ++k) {
            if (batch.counts[k] != 0) csv += fmt::format("{},{}\n", k, batch.counts[k]);
        }
        json meta = make_meta(
            "sample", {{"model", json::parse(citesim::model_json::to_json(model))},
                       {"draws", draws},
                       {"seed", seed},
                       {"max_k", max_k}});
        meta["result"] = {{"beyond_max_k", batch.beyond},
                          {"cap_hits", batch.cap_hits},
                          {"total", batch.total},
                          {"mean", batch.mean()}};
        emit(csv, output, meta);
    }
};

struct VerifyLimitCmd {
    double lambda = 1.0;
    double gamma = 0.5;
    double q = 0.5;
    std::vector<double> n_values;
    std::string output;

    void run() const {
        const auto report = citesim::asymptotics::convergence_report(lambda, gamma, q, n_values);
        std::string csv = "n,sup_error\n";
        for (const auto& row : report.rows) {
            csv += fmt::format("{},{}\n", static_cast<std::int64_t>(row.n), row.sup_error);
        }
        emit(csv, output,
             make_meta("verify-limit", {{"lambda", lambda},
                                        {"gamma", gamma},
                                        {"q", q},
                                        {"strictly_decreasing", report.strictly_decreasing}}));
    }
};

struct StabilityCmd {
    double lambda = 1.0;
    double gamma = 0.5;
    double q = 0.5;
    std::vector<double> u_values = {0.25, 0.5, 0.75};
    std::string output;

    void run() const {
        const citesim::models::DiscreteStableParams stable{lambda, gamma, q};
        const citesim::models::ModelSpec model = stable;
        std::string csv = "u,z,lhs,rhs,abs_error\n";
        double worst = 0.0;
        for (double u : u_values) {
            for (int i = 0; i < 10; ++i) {
                const double z = 0.1 * i;
                const double zu = citesim::models::stability_transform({u, q}, z);
                const double lhs = citesim::models::pgf_eval(model, zu);
                const double rhs =
                    std::pow(citesim::models::pgf_eval(model, z), std::pow(u, gamma));
                const double err = std::abs(lhs - rhs);
                worst = std::max(worst, err);
                csv += fmt::format("{},{},{},{},{}\n", u, z, lhs, rhs, err);
            }
        }
        emit(csv, output,
             make_meta("stability-check",
                       {{"lambda", lambda}, {"gamma", gamma}, {"q", q}, {"max_abs_error", worst}}));
    }
};

struct FitCmd {
    std::string dataset;
    std::int64_t threshold = -1;
    std::string output;

    void run() const {
        const auto data = citesim::inference::resolve_dataset(dataset);
        const std::int64_t thr = threshold >= 0 ? threshold : default_threshold(data.name);
        const auto curve = citesim::inference::neg_log_survival(data);
        const auto fit = citesim::inference::linear_fit(curve, thr);
        const auto mle = citesim::inference::geometric_mle(data);
        std::string csv =
            "dataset,n,q_hat,log_likelihood,slope,intercept,r_squared,x_threshold\n";
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", data.name, data.counts.size(), mle.q_hat,
                           mle.log_likelihood, fit.slope, fit.intercept, fit.r_squared,
                           fit.x_threshold);
        emit(csv, output,
             make_meta("fit", {{"dataset", dataset}, {"threshold", thr}, {"source", data.source}}));
    }
};

struct FiguresCmd {
    std::string dataset;
    std::int64_t threshold = -1;
    std::string output;

    void run() const {
        const auto data = citesim::inference::resolve_dataset(dataset);
        const std::int64_t thr = threshold >= 0 ? threshold : default_threshold(data.name);
        auto curve = citesim::inference::neg_log_survival(data);
        curve.fit = citesim::inference::linear_fit(curve, thr);
        std::string csv = "x,neg_log_survival,fitted_line\n";
        for (const auto& point : curve.points) {
            csv += fmt::format("{},{},{}\n", point.x, point.y,
                               curve.fit->slope * static_cast<double>(point.x) +
                                   curve.fit->intercept);
        }
        emit(csv, output,
             make_meta("figures", {{"dataset", dataset},
                                   {"threshold", thr},
                                   {"source", data.source},
                                   {"slope", curve.fit->slope},
                                   {"intercept", curve.fit->intercept},
                                   {"r_squared", curve.fit->r_squared}}));
    }
};

struct TestEliteCmd {
    std::string dataset;
    int reps = 199;
    std::uint64_t seed = 0;
    std::string output;

    void run() const {
        const auto data = citesim::inference::resolve_dataset(dataset);
        const citesim::RngState rng(seed);
        const auto result = citesim::inference::equality_vs_elite_test(data, reps, rng);
        const auto& fit = std::get<citesim::models::BetaLike>(result.elite_fit);
        std::string csv = "lr_statistic,p_value,s,b\n";
        csv += fmt::format("{},{},{},{}\n", result.lr_statistic, result.p_value, fit.s, fit.b);
        emit(csv, output,
             make_meta("test-elite",
                       {{"dataset", dataset}, {"reps", reps}, {"seed", seed}}));
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citesim: publication/citation toy-model toolkit"};
    app.require_subcommand(1);

    PmfCmd pmf;
    auto* pmf_cmd = app.add_subcommand("pmf", "Extract a model pmf from its p.g.f.");
    pmf_cmd->add_option("--model", pmf.model_json, "model JSON")->required();
    pmf_cmd->add_option("--max-k", pmf.max_k, "largest k to report");
    pmf_cmd->add_option("--output", pmf.output, "CSV path (stdout when omitted)");

    SampleCmd sample;
    auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo histogram of a model");
    sample_cmd->add_option("--model", sample.model_json, "model JSON")->required();
    sample_cmd->add_option("--draws", sample.draws, "number of draws")->required();
    sample_cmd->add_option("--seed", sample.seed, "RNG seed")->required();
    sample_cmd->add_option("--max-k", sample.max_k, "histogram upper bound");
    sample_cmd->add_flag("--serial", sample.serial, "disable the parallel kernel");
    sample_cmd->add_option("--output", sample.output, "CSV path (stdout when omitted)");

    VerifyLimitCmd verify;
    auto* verify_cmd = app.add_subcommand("verify-limit", "Tabulate aggregate-to-limit sup errors");
    verify_cmd->add_option("--lambda", verify.lambda, "limit intensity");
    verify_cmd->add_option("--gamma", verify.gamma, "tail exponent");
    verify_cmd->add_option("--q", verify.q, "acceptance probability");
    verify_cmd->add_option("--n", verify.n_values, "aggregate sizes")->delimiter(',');
    verify_cmd->add_option("--output", verify.output, "CSV path (stdout when omitted)");

    StabilityCmd stability;
    auto* stability_cmd = app.add_subcommand("stability-check", "Check the discrete-stability identity");
    stability_cmd->add_option("--lambda", stability.lambda, "intensity");
    stability_cmd->add_option("--gamma", stability.gamma, "tail exponent");
    stability_cmd->add_option("--q", stability.q, "acceptance probability");
    stability_cmd->add_option("--u", stability.u_values, "thinning levels")->delimiter(',');
    stability_cmd->add_option("--output", stability.output, "CSV path (stdout when omitted)");

    FitCmd fit;
    auto* fit_cmd = app.add_subcommand("fit", "Geometric MLE and survival-line fit for a dataset");
    fit_cmd->add_option("--dataset", fit.dataset, "ex1..ex4 or a file path")->required();
    fit_cmd->add_option("--threshold", fit.threshold, "largest x used by the line fit");
    fit_cmd->add_option("--output", fit.output, "CSV path (stdout when omitted)");

    FiguresCmd figures;
    auto* figures_cmd = app.add_subcommand("figures", "Survival-curve points and fitted line");
    figures_cmd->add_option("--dataset", figures.dataset, "ex1..ex4 or a file path")->required();
    figures_cmd->add_option("--threshold", figures.threshold, "largest x used by the line fit");
    figures_cmd->add_option("--output", figures.output, "CSV path (stdout when omitted)");

    TestEliteCmd elite;
    auto* elite_cmd = app.add_subcommand("test-elite", "Equality-vs-Elite likelihood-ratio test");
    elite_cmd->add_option("--dataset", elite.dataset, "ex1..ex4 or a file path")->required();
    elite_cmd->add_option("--reps", elite.reps, "bootstrap replicates (>= 99)");
    elite_cmd->add_option("--seed", elite.seed, "RNG seed")->required();
    elite_cmd->add_option("--output", elite.output, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fmt::print(stderr, "{}\n",
                   json{{"error", "validation"}, {"message", e.what()}}.dump());
        return 1;
    }

    try {
        if (*pmf_cmd) pmf.run();
        if (*sample_cmd) sample.run();
        if (*verify_cmd) verify.run();
        if (*stability_cmd) stability.run();
        if (*fit_cmd) fit.run();
        if (*figures_cmd) figures.run();
        if (*elite_cmd) elite.run();
    } catch (const citesim::ValidationError& e) {
        fmt::print(stderr, "{}\n",
                   json{{"error", "validation"}, {"message", e.what()}}.dump());
        return 1;
    } catch (const citesim::NumericalError& e) {
        fmt::print(stderr, "{}\n",
                   json{{"error", "numerical"}, {"message", e.what()}}.dump());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "{}\n",
                   json{{"error", "runtime"}, {"message", e.what()}}.dump());
        return 2;
    }
    return 0;
}

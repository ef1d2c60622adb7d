// mdhc command-line tool: fit / assign / eval / synth / diagnose.
//
// Links only the public C API (mdhc/capi.h). All reports are line-oriented
// key=value text; see README.md for the schemas.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdhc/capi.h"
#include "csv.hpp"

namespace {

[[noreturn]] void die(const std::string& category, const std::string& message) {
    std::fprintf(stderr, "error: %s: %s\n", category.c_str(), message.c_str());
    std::exit(1);
}

void check(mdhc_status s) {
    if (s != MDHC_OK) die(mdhc_status_name(s), mdhc_last_error());
}

struct TreeDeleter {
    void operator()(mdhc_tree* t) const { mdhc_tree_free(t); }
};
struct SelectionDeleter {
    void operator()(mdhc_selection* s) const { mdhc_selection_free(s); }
};
struct MixtureDeleter {
    void operator()(mdhc_mixture* m) const { mdhc_mixture_free(m); }
};
using TreePtr = std::unique_ptr<mdhc_tree, TreeDeleter>;
using SelectionPtr = std::unique_ptr<mdhc_selection, SelectionDeleter>;
using MixturePtr = std::unique_ptr<mdhc_mixture, MixtureDeleter>;

TreePtr load_tree(const std::string& path) {
    mdhc_tree* t = nullptr;
    check(mdhc_tree_load(path.c_str(), &t));
    return TreePtr(t);
}

MixturePtr load_mixture(const std::string& path) {
    mdhc_mixture* m = nullptr;
    check(mdhc_mixture_load(path.c_str(), &m));
    return MixturePtr(m);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die("io", "cannot open output file: " + path);
    return out;
}

// Shared learn/schedule flags (depth lives with fit/diagnose).
struct ConfigFlags {
    mdhc_config cfg;
    void attach(CLI::App* app) {
        mdhc_config_defaults(&cfg);
        app->add_option("--C", cfg.C, "penalty coefficient");
        app->add_option("--alpha-factor", cfg.alpha_factor, "alpha = alpha_factor * sigma_hat");
        app->add_option("--q", cfg.q, "bandwidth exponent");
        app->add_option("--r", cfg.r, "learning-rate exponent");
        app->add_option("--gbar1-scale", cfg.gbar1_scale, "gamma1 = gbar1_scale*sqrt(d)*t^-r");
        app->add_option("--gbar2", cfg.gbar2, "gamma2 = gbar2*t^-r");
        app->add_option("--eta", cfg.eta, "admissibility margin exponent");
        app->add_option("--h-floor", cfg.h_floor, "bandwidth scale floor");
        app->add_option("--seed", cfg.seed, "random seed");
    }
};

struct FitOptions {
    std::string input, model_path, report_path;
    bool header = false;
    int depth = 8;
    int k = 0;
    int kmax_min = 0, kmax_max = 0;
    int64_t shuffle_seed = -1;
    ConfigFlags flags;
};

void run_fit(const FitOptions& opt) {
    check(mdhc_config_validate(&opt.flags.cfg));
    auto t0 = std::chrono::steady_clock::now();

    mdhc_tree* raw = nullptr;
    TreePtr tree;
    std::size_t n = 0;
    try {
        if (opt.shuffle_seed >= 0) {
            // buffered path: read everything, permute, then stream
            std::vector<std::vector<double>> rows;
            mdhc_cli::for_each_row(opt.input, opt.header,
                                   [&](std::size_t, const std::vector<double>& row) {
                                       rows.push_back(row);
                                   });
            std::vector<std::size_t> order(rows.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::mt19937_64 rng(static_cast<uint64_t>(opt.shuffle_seed));
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t idx : order) {
                const auto& row = rows[idx];
                if (!tree) {
                    check(mdhc_tree_create(opt.depth, static_cast<int>(row.size()),
                                           &opt.flags.cfg, &raw));
                    tree.reset(raw);
                }
                int leaf = 0;
                check(mdhc_tree_observe(tree.get(), row.data(),
                                        static_cast<int>(row.size()), &leaf));
                ++n;
            }
        } else {
            mdhc_cli::for_each_row(opt.input, opt.header,
                                   [&](std::size_t, const std::vector<double>& row) {
                                       if (!tree) {
                                           check(mdhc_tree_create(opt.depth,
                                                                  static_cast<int>(row.size()),
                                                                  &opt.flags.cfg, &raw));
                                           tree.reset(raw);
                                       }
                                       int leaf = 0;
                                       check(mdhc_tree_observe(tree.get(), row.data(),
                                                               static_cast<int>(row.size()),
                                                               &leaf));
                                       ++n;
                                   });
        }
    } catch (const mdhc_cli::CsvIoError& e) {
        die("io", e.what());
    } catch (const mdhc_cli::CsvError& e) {
        die("parse", e.what());
    }
    if (!tree) die("invalid_argument", "input file has no data rows: " + opt.input);

    mdhc_selection* sraw = nullptr;
    check(mdhc_selection_create(tree.get(), &sraw));
    SelectionPtr sel(sraw);
    int max_leaves = mdhc_selection_max_leaves(sel.get());
    std::vector<double> curve(static_cast<std::size_t>(max_leaves));
    check(mdhc_selection_ss_curve(sel.get(), curve.data()));

    int selected_k = 0;
    std::string mode;
    int degenerate = 0;
    std::vector<int> kmaxs;
    if (opt.k > 0) {
        if (opt.k > max_leaves)
            die("invalid_argument", "--k exceeds leaf count " + std::to_string(max_leaves));
        selected_k = opt.k;
        mode = "forced";
    } else {
        int lo = opt.kmax_min > 0 ? opt.kmax_min : 4;
        int hi = opt.kmax_max > 0 ? opt.kmax_max : max_leaves;
        for (int k = lo; k <= hi; ++k) kmaxs.push_back(k);
        if (kmaxs.empty() || hi > max_leaves || lo < 3) {
            if (opt.kmax_min > 0 || opt.kmax_max > 0)
                die("config", "Kmax range [" + std::to_string(lo) + "," + std::to_string(hi) +
                                  "] invalid for a tree with " + std::to_string(max_leaves) +
                                  " leaves");
            // tree too small for the default voting range: keep every leaf
            selected_k = max_leaves;
            mode = "full";
        } else {
            check(mdhc_selection_vote(sel.get(), kmaxs.data(),
                                      static_cast<int>(kmaxs.size()), &selected_k,
                                      &degenerate));
            mode = degenerate ? "degenerate" : "vote";
        }
    }

    std::vector<int> leaves(static_cast<std::size_t>(selected_k));
    check(mdhc_selection_leaves(sel.get(), selected_k, leaves.data()));
    check(mdhc_tree_set_selection(tree.get(), selected_k, leaves.data()));
    check(mdhc_tree_save(tree.get(), opt.model_path.c_str()));

    double fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!opt.report_path.empty()) {
        auto out = open_output(opt.report_path);
        out << "n=" << n << "\n";
        out << "d=" << mdhc_tree_dim(tree.get()) << "\n";
        out << "depth=" << mdhc_tree_depth(tree.get()) << "\n";
        out << "nodes=" << mdhc_tree_node_count(tree.get()) << "\n";
        for (int K = 1; K <= max_leaves; ++K)
            out << "ss K=" << K << " value="
                << mdhc_cli::format_double(curve[static_cast<std::size_t>(K - 1)]) << "\n";
        for (int kmax : kmaxs) {
            int pick = 0;
            if (mdhc_selection_pick(sel.get(), kmax, &pick) == MDHC_OK)
                out << "pick kmax=" << kmax << " k=" << pick << "\n";
        }
        out << "selected k=" << selected_k << " mode=" << mode << "\n";
        out << "leaves=";
        for (std::size_t i = 0; i < leaves.size(); ++i)
            out << (i ? " " : "") << leaves[i];
        out << "\n";
    }

    std::printf("n=%zu d=%d depth=%d selected_k=%d mode=%s model=%s fit_seconds=%.6f\n", n,
                mdhc_tree_dim(tree.get()), mdhc_tree_depth(tree.get()), selected_k,
                mode.c_str(), opt.model_path.c_str(), fit_seconds);
}

struct AssignOptions {
    std::string model_path, input, output;
    bool header = false;
};

void run_assign(const AssignOptions& opt) {
    auto tree = load_tree(opt.model_path);
    if (mdhc_tree_selected_k(tree.get()) == 0)
        die("invalid_argument", "model has no cluster selection: " + opt.model_path);
    auto out = open_output(opt.output);
    try {
        mdhc_cli::for_each_row(opt.input, opt.header,
                               [&](std::size_t, const std::vector<double>& row) {
                                   int cluster = 0;
                                   check(mdhc_tree_cluster(tree.get(), row.data(),
                                                           static_cast<int>(row.size()),
                                                           &cluster));
                                   out << cluster << "\n";
                               });
    } catch (const mdhc_cli::CsvIoError& e) {
        die("io", e.what());
    } catch (const mdhc_cli::CsvError& e) {
        die("parse", e.what());
    }
}

struct EvalOptions {
    std::string pred_path, truth_path;
    bool header = false;
};

void run_eval(const EvalOptions& opt) {
    std::vector<int> pred, truth;
    try {
        pred = mdhc_cli::read_label_column(opt.pred_path, opt.header);
        truth = mdhc_cli::read_label_column(opt.truth_path, opt.header);
    } catch (const mdhc_cli::CsvIoError& e) {
        die("io", e.what());
    } catch (const mdhc_cli::CsvError& e) {
        die("parse", e.what());
    }
    if (pred.size() != truth.size())
        die("invalid_argument",
            "length mismatch: " + std::to_string(pred.size()) + " predictions vs " +
                std::to_string(truth.size()) + " truth labels");
    double nmi = 0.0, ari = 0.0;
    check(mdhc_nmi(truth.data(), pred.data(), static_cast<int64_t>(pred.size()), &nmi));
    check(mdhc_ari(truth.data(), pred.data(), static_cast<int64_t>(pred.size()), &ari));
    std::vector<int> distinct(pred);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::printf("n=%zu\nK=%zu\nnmi=%s\nari=%s\n", pred.size(), distinct.size(),
                mdhc_cli::format_double(nmi).c_str(), mdhc_cli::format_double(ari).c_str());
}

struct SynthOptions {
    std::string mixture_path, output, labels_path;
    int64_t n = 0;
    uint64_t seed = 0;
};

void run_synth(const SynthOptions& opt) {
    if (opt.n < 0) die("invalid_argument", "--n must be nonnegative");
    auto mix = load_mixture(opt.mixture_path);
    int d = mdhc_mixture_dim(mix.get());
    std::vector<double> x(static_cast<std::size_t>(opt.n) * static_cast<std::size_t>(d));
    std::vector<int> labels(static_cast<std::size_t>(opt.n));
    check(mdhc_mixture_sample(mix.get(), opt.n, opt.seed, x.data(), labels.data()));
    auto out = open_output(opt.output);
    for (int64_t i = 0; i < opt.n; ++i) {
        for (int j = 0; j < d; ++j)
            out << (j ? "," : "")
                << mdhc_cli::format_double(x[static_cast<std::size_t>(i * d + j)]);
        out << "\n";
    }
    if (!opt.labels_path.empty()) {
        auto lout = open_output(opt.labels_path);
        for (int64_t i = 0; i < opt.n; ++i) lout << labels[static_cast<std::size_t>(i)] << "\n";
    }
}

struct DiagnoseOptions {
    std::string mixture_path, output;
    int64_t n = 100000;
    int64_t bias_samples = 20000;
    ConfigFlags flags;
};

// checkpoint schedule: 1-2-5 per decade starting at 100, plus the final step
std::vector<int64_t> checkpoints(int64_t n) {
    std::vector<int64_t> ts;
    for (int64_t decade = 100; decade <= n; decade *= 10)
        for (int64_t m : {1, 2, 5})
            if (m * decade <= n) ts.push_back(m * decade);
    if (ts.empty() || ts.back() != n) ts.push_back(n);
    return ts;
}

void run_diagnose(const DiagnoseOptions& opt) {
    check(mdhc_config_validate(&opt.flags.cfg));
    if (opt.n < 1) die("invalid_argument", "--n must be positive");
    auto mix = load_mixture(opt.mixture_path);
    int d = mdhc_mixture_dim(mix.get());

    std::vector<double> x(static_cast<std::size_t>(opt.n) * static_cast<std::size_t>(d));
    check(mdhc_mixture_sample(mix.get(), opt.n, opt.flags.cfg.seed, x.data(), nullptr));

    mdhc_tree* raw = nullptr;
    check(mdhc_tree_create(2, d, &opt.flags.cfg, &raw));
    TreePtr tree(raw);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!opt.output.empty()) {
        file = open_output(opt.output);
        out = &file;
    }
    *out << "n=" << opt.n << "\nd=" << d << "\n";

    auto ts = checkpoints(opt.n);
    std::size_t next = 0;
    std::vector<double> v(static_cast<std::size_t>(d)), mean(static_cast<std::size_t>(d));
    for (int64_t t = 1; t <= opt.n; ++t) {
        int leaf = 0;
        check(mdhc_tree_observe(tree.get(), &x[static_cast<std::size_t>((t - 1) * d)], d,
                                &leaf));
        if (next < ts.size() && t == ts[next]) {
            ++next;
            double b = 0.0, sigma = 0.0;
            uint64_t count = 0;
            check(mdhc_tree_node_hyperplane(tree.get(), 1, v.data(), &b));
            check(mdhc_tree_node_mean(tree.get(), 1, mean.data()));
            check(mdhc_tree_node_stats(tree.get(), 1, &count, &sigma));
            // the stored split is v.(x - mean) = b; express it in raw coordinates
            double b_raw = b;
            for (int j = 0; j < d; ++j) b_raw += v[static_cast<std::size_t>(j)] *
                                                 mean[static_cast<std::size_t>(j)];
            double sig = std::isnan(sigma) ? 0.0 : sigma;
            double alpha = opt.flags.cfg.alpha_factor * sig;
            double res_v = 0.0, res_b = 0.0, objective = 0.0, bias = 0.0;
            check(mdhc_mixture_residual(mix.get(), v.data(), d, b_raw, opt.flags.cfg.C,
                                        alpha, &res_v, &res_b));
            check(mdhc_mixture_objective(mix.get(), v.data(), d, b_raw, opt.flags.cfg.C,
                                         alpha, &objective));
            double scale = std::max(sig, opt.flags.cfg.h_floor);
            double h = scale * std::pow(static_cast<double>(t), -opt.flags.cfg.q);
            check(mdhc_mixture_gradient_bias(mix.get(), v.data(), d, b_raw, h,
                                             opt.bias_samples,
                                             opt.flags.cfg.seed + static_cast<uint64_t>(t),
                                             &bias));
            *out << "checkpoint t=" << t
                 << " res_v=" << mdhc_cli::format_double(res_v)
                 << " res_b=" << mdhc_cli::format_double(res_b)
                 << " objective=" << mdhc_cli::format_double(objective)
                 << " bias=" << mdhc_cli::format_double(bias)
                 << " h=" << mdhc_cli::format_double(h)
                 << " sigma=" << mdhc_cli::format_double(sig)
                 << " b=" << mdhc_cli::format_double(b_raw) << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming minimum-density-hyperplane clustering"};
    app.require_subcommand(1);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit a tree model from a CSV stream");
    fit_cmd->add_option("--input", fit.input, "input CSV")->required();
    fit_cmd->add_option("--model", fit.model_path, "output model file")->required();
    fit_cmd->add_option("--report", fit.report_path, "selection report file");
    fit_cmd->add_flag("--header", fit.header, "skip the first line");
    fit_cmd->add_option("--depth", fit.depth, "tree depth (levels)");
    fit_cmd->add_option("--k", fit.k, "force the cluster count");
    fit_cmd->add_option("--kmax-min", fit.kmax_min, "voting range lower bound");
    fit_cmd->add_option("--kmax-max", fit.kmax_max, "voting range upper bound");
    fit_cmd->add_option("--shuffle-seed", fit.shuffle_seed,
                        "permute input rows with this seed (buffers the input)");
    fit.flags.attach(fit_cmd);

    AssignOptions assign;
    auto* assign_cmd = app.add_subcommand("assign", "label a CSV with a fitted model");
    assign_cmd->add_option("--model", assign.model_path, "model file")->required();
    assign_cmd->add_option("--input", assign.input, "input CSV")->required();
    assign_cmd->add_option("--output", assign.output, "output label file")->required();
    assign_cmd->add_flag("--header", assign.header, "skip the first line");

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    eval_cmd->add_option("--pred", eval.pred_path, "predicted label file")->required();
    eval_cmd->add_option("--truth", eval.truth_path, "ground-truth label file")->required();
    eval_cmd->add_flag("--header", eval.header, "skip the first line of each file");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "sample a Gaussian mixture to CSV");
    synth_cmd->add_option("--mixture", synth.mixture_path, "mixture spec file")->required();
    synth_cmd->add_option("--n", synth.n, "number of rows")->required();
    synth_cmd->add_option("--seed", synth.seed, "random seed");
    synth_cmd->add_option("--output", synth.output, "output data CSV")->required();
    synth_cmd->add_option("--labels", synth.labels_path, "output label file");

    DiagnoseOptions diag;
    auto* diag_cmd = app.add_subcommand(
        "diagnose", "single-split fit against a known mixture with checkpoints");
    diag_cmd->add_option("--mixture", diag.mixture_path, "mixture spec file")->required();
    diag_cmd->add_option("--n", diag.n, "stream length");
    diag_cmd->add_option("--bias-samples", diag.bias_samples,
                         "Monte Carlo draws per bias estimate");
    diag_cmd->add_option("--output", diag.output, "report file (default stdout)");
    diag.flags.attach(diag_cmd);

    CLI11_PARSE(app, argc, argv);

    if (fit_cmd->parsed()) run_fit(fit);
    else if (assign_cmd->parsed()) run_assign(assign);
    else if (eval_cmd->parsed()) run_eval(eval);
    else if (synth_cmd->parsed()) run_synth(synth);
    else if (diag_cmd->parsed()) run_diagnose(diag);
    return 0;
}

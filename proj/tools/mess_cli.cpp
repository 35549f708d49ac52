#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mess/basis.hpp"
#include "mess/datagen.hpp"
#include "mess/errors.hpp"
#include "mess/matio.hpp"
#include "mess/matrix.hpp"
#include "mess/metrics.hpp"
#include "mess/pod.hpp"
#include "mess/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CpuTimer {
public:
    double seconds() const {
        return static_cast<double>(std::clock() - t0_) / CLOCKS_PER_SEC;
    }

private:
    std::clock_t t0_ = std::clock();
};

const char* extension_of(mess::MatrixFormat format) {
    switch (format) {
    case mess::MatrixFormat::Csv:
        return ".csv";
    case mess::MatrixFormat::Pgm:
        return ".pgm";
    default:
        return ".bin";
    }
}

mess::MatrixFormat pick_format(const std::string& spec, const fs::path& input) {
    if (spec == "auto") return mess::format_from_extension(input);
    if (spec == "csv") return mess::MatrixFormat::Csv;
    if (spec == "pgm") return mess::MatrixFormat::Pgm;
    if (spec == "bin" || spec == "messbin") return mess::MatrixFormat::MessBin;
    throw mess::ParameterError("unknown format '" + spec + "'");
}

void ensure_out_dir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw mess::IoError("cannot create output directory '" + out.string() +
                            "': " + ec.message());
    }
}

struct CommonOpts {
    std::string out;
    int threads = 1;
};

struct InputOpts {
    std::string input;
    std::string format = "auto";

    mess::Matrix load(json& report, json& timing) const {
        const fs::path path = input;
        CpuTimer t;
        mess::Matrix x = mess::read_matrix(path, pick_format(format, path));
        timing["read_input"] = t.seconds();
        report["input"] = path.string();
        report["m"] = x.rows();
        report["n"] = x.cols();
        return x;
    }
};

struct EpsOpts {
    double eps = 0.05;
    std::string mode = "relative";

    mess::EpsilonRule rule() const {
        if (mode == "relative") return mess::EpsilonRule::relative(eps);
        if (mode == "absolute") return mess::EpsilonRule::absolute(eps);
        throw mess::ParameterError("unknown epsilon mode '" + mode + "'");
    }
};

struct StopOpts {
    bool enabled = false;
    double tol = 1e-3;
    std::size_t window = 10;

    mess::StopConfig config() const {
        mess::StopConfig stop;
        stop.enabled = enabled;
        stop.potential_tol = tol;
        stop.window = window;
        return stop;
    }
};

json eps_rule_json(const mess::EpsilonRule& rule) {
    return {{"mode", rule.mode == mess::EpsilonMode::Absolute ? "absolute"
                                                              : "relative"},
            {"value", rule.value}};
}

// Shared sample stage of the sample/basis/compress commands: offline run
// with the exact trace, report fields, trace.csv.
mess::SampleResult run_sample_stage(const mess::Matrix& x,
                                    const mess::EpsilonRule& rule,
                                    const mess::StopConfig& stop, int threads,
                                    const fs::path& out, json& report,
                                    json& timing) {
    CpuTimer t;
    mess::SampleResult result = mess::mess_sample(x, rule, stop, threads);
    timing["sample"] = t.seconds();

    report["eps_rule"] = eps_rule_json(rule);
    report["sample"] = mess::sample_report_json(result);
    if (result.stop_index) {
        const std::size_t j_star = *result.stop_index;
        const double v_star = result.trace.v.at(j_star - 1);
        report["horizon"] =
            mess::horizon_report_json(mess::horizon_bound(j_star, v_star));
    }
    CpuTimer tv;
    report["verified_max_entropy"] =
        mess::verify_max_entropy(result.selected_snapshots, result.epsilon_abs,
                                 threads);
    timing["verify"] = tv.seconds();
    mess::write_trace_csv(result.trace, out / "trace.csv");
    return result;
}

int finish_report(json& report, json timing, const fs::path& out) {
    report["cpu_seconds"] = std::move(timing);
    mess::write_report(report, out / "report.json");
    std::cout << (out / "report.json").string() << "\n";
    return 0;
}

struct GenOpts {
    CommonOpts common;
    std::string kind = "brusselator";
    std::string format = "bin";
    mess::BrusselatorConfig brusselator;
    std::size_t walk_m = 50;
    std::size_t walk_n = 200;
    double walk_step = 1.0;
    std::uint64_t walk_seed = 0;
};

int cmd_gen(const GenOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    const mess::MatrixFormat format = pick_format(opt.format, "");

    json report;
    json timing;
    report["command"] = "gen";
    report["kind"] = opt.kind;

    CpuTimer tg;
    mess::Matrix x;
    if (opt.kind == "brusselator") {
        x = mess::gen_brusselator(opt.brusselator);
        report["params"] = {{"grid_points", opt.brusselator.grid_points},
                            {"alpha", opt.brusselator.alpha},
                            {"t_end", opt.brusselator.t_end},
                            {"n_snapshots", opt.brusselator.n_snapshots},
                            {"dt_internal", opt.brusselator.dt_internal}};
    } else if (opt.kind == "random-walk") {
        x = mess::gen_random_walk(opt.walk_m, opt.walk_n, opt.walk_step,
                                  opt.walk_seed);
        report["params"] = {{"m", opt.walk_m},
                            {"n", opt.walk_n},
                            {"step_scale", opt.walk_step},
                            {"seed", opt.walk_seed}};
    } else {
        throw mess::ParameterError("unknown generator kind '" + opt.kind + "'");
    }
    timing["generate"] = tg.seconds();

    const fs::path snap = out / (std::string("snapshots") + extension_of(format));
    CpuTimer tw;
    mess::write_matrix(x, snap, format);
    timing["write"] = tw.seconds();

    report["m"] = x.rows();
    report["n"] = x.cols();
    report["snapshots"] = snap.string();
    report["cpu_seconds"] = std::move(timing);
    mess::write_report(report, out / "report.json");
    std::cout << snap.string() << "\n";
    return 0;
}

struct SampleOpts {
    CommonOpts common;
    InputOpts input;
    EpsOpts eps;
    StopOpts stop;
};

int cmd_sample(const SampleOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    json report;
    json timing;
    report["command"] = "sample";
    const mess::Matrix x = opt.input.load(report, timing);
    run_sample_stage(x, opt.eps.rule(), opt.stop.config(), opt.common.threads,
                     out, report, timing);
    return finish_report(report, std::move(timing), out);
}

struct BasisOpts {
    CommonOpts common;
    InputOpts input;
    EpsOpts eps;
    StopOpts stop;
    double rank_tol = 1e-12;
};

int cmd_basis(const BasisOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    json report;
    json timing;
    report["command"] = "basis";
    const mess::Matrix x = opt.input.load(report, timing);
    const mess::SampleResult sample =
        run_sample_stage(x, opt.eps.rule(), opt.stop.config(),
                         opt.common.threads, out, report, timing);

    CpuTimer tq;
    const mess::ReducedBasis basis =
        mess::orthonormalize(sample.selected_snapshots, opt.rank_tol);
    timing["orthonormalize"] = tq.seconds();
    report["basis"] = mess::basis_report_json(basis);

    mess::write_matrix(basis.q, out / "basis.bin", mess::MatrixFormat::MessBin);
    report["basis_path"] = (out / "basis.bin").string();
    return finish_report(report, std::move(timing), out);
}

struct CompressOpts {
    CommonOpts common;
    InputOpts input;
    EpsOpts eps;
    StopOpts stop;
    double rank_tol = 1e-12;
    std::string rel_norm = "diameter";
};

int cmd_compress(const CompressOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    json report;
    json timing;
    report["command"] = "compress";
    const mess::Matrix x = opt.input.load(report, timing);
    const mess::EpsilonRule rule = opt.eps.rule();
    const mess::SampleResult sample = run_sample_stage(
        x, rule, opt.stop.config(), opt.common.threads, out, report, timing);

    CpuTimer tq;
    const mess::ReducedBasis basis =
        mess::orthonormalize(sample.selected_snapshots, opt.rank_tol);
    timing["orthonormalize"] = tq.seconds();
    report["basis"] = mess::basis_report_json(basis);
    mess::write_matrix(basis.q, out / "basis.bin", mess::MatrixFormat::MessBin);

    const mess::RelativeErrorNorm rel =
        opt.rel_norm == "frobenius" ? mess::RelativeErrorNorm::FrobeniusNorm
                                    : mess::RelativeErrorNorm::Diameter;
    std::optional<double> scale;
    if (rel == mess::RelativeErrorNorm::Diameter &&
        rule.mode == mess::EpsilonMode::RelativeToDiameter) {
        scale = sample.epsilon_abs / rule.value;
    }
    CpuTimer te;
    const mess::ErrorReport errors = mess::reconstruction_errors(
        x, basis, sample.epsilon_abs, rel, scale, opt.common.threads);
    timing["errors"] = te.seconds();

    CpuTimer tx;
    mess::Matrix xhat(x.rows(), x.cols());
    mess::parallel_for(0, x.cols(), opt.common.threads, [&](std::size_t j) {
        const std::vector<double> col = mess::project(basis, x.col_span(j));
        for (std::size_t i = 0; i < x.rows(); ++i) xhat(i, j) = col[i];
    });
    const mess::MatrixFormat in_format =
        pick_format(opt.input.format, opt.input.input);
    mess::write_matrix(xhat, out / "xhat.bin", mess::MatrixFormat::MessBin);
    if (in_format == mess::MatrixFormat::Pgm) {
        mess::write_matrix(xhat, out / "xhat.pgm", mess::MatrixFormat::Pgm);
    }
    timing["reconstruct"] = tx.seconds();

    const bool bound_ok =
        errors.max_abs < sample.epsilon_abs * (1.0 + 1e-9);
    json err_json = mess::error_report_json(errors);
    err_json["bound_satisfied"] = bound_ok;
    report["errors"] = std::move(err_json);
    const int rc = finish_report(report, std::move(timing), out);
    if (!bound_ok) {
        std::cerr << "reconstruction bound violated: max error "
                  << errors.max_abs << " vs epsilon " << sample.epsilon_abs
                  << "\n";
        return 4;
    }
    return rc;
}

struct CompareOpts {
    CommonOpts common;
    InputOpts input;
    EpsOpts eps;
    double rank_tol = 1e-12;
};

int cmd_compare(const CompareOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    json report;
    json timing;
    report["command"] = "compare";
    const mess::Matrix x = opt.input.load(report, timing);

    const mess::EpsilonRule rule = opt.eps.rule();
    CpuTimer teps;
    const double eps_abs =
        mess::resolve_epsilon(rule, x, opt.common.threads);
    timing["resolve_epsilon"] = teps.seconds();
    report["eps_rule"] = eps_rule_json(rule);
    report["epsilon_abs"] = eps_abs;

    // MESS pipeline: one streaming pass over the columns, then a thin QR of
    // the selected columns.
    CpuTimer tsel;
    const mess::SampleResult sample =
        mess::mess_sample_streaming(mess::matrix_stream(x), eps_abs);
    const double t_selection = tsel.seconds();
    CpuTimer tqr;
    const mess::ReducedBasis mess_basis =
        mess::orthonormalize(sample.selected_snapshots, opt.rank_tol);
    const double t_qr = tqr.seconds();
    const std::size_t ell = mess_basis.ell;

    json mess_branch;
    mess_branch["n_selected"] = sample.selected.size();
    mess_branch["ell"] = ell;
    mess_branch["cpu_seconds"] = {{"selection", t_selection},
                                  {"orthonormalize", t_qr},
                                  {"total", t_selection + t_qr}};

    // SVD pipeline: full economy factorization, basis truncated to the same
    // size as the MESS basis.
    CpuTimer tsvd;
    const mess::SvdFactors factors = mess::svd(x);
    const double t_svd = tsvd.seconds();
    const double tol = mess::rank_threshold(factors, x.rows(), x.cols());
    std::size_t rank = 0;
    for (double s : factors.sigma) {
        if (s > tol) ++rank;
    }
    const std::size_t ell_pod = std::min(ell, rank);
    std::vector<std::size_t> keep(ell_pod);
    for (std::size_t k = 0; k < ell_pod; ++k) keep[k] = k;
    mess::ReducedBasis pod;
    pod.m = x.rows();
    pod.ell = ell_pod;
    pod.q = factors.u.select_columns(keep);
    pod.provenance = mess::BasisProvenance::Pod;
    pod.numerical_rank_tol = tol;

    json svd_branch;
    svd_branch["ell"] = ell_pod;
    svd_branch["numerical_rank"] = rank;
    svd_branch["cpu_seconds"] = {{"svd", t_svd}, {"total", t_svd}};

    // Reconstruction quality at equal basis size, relative to ||X||_F so no
    // quadratic-cost diameter pass is needed.
    CpuTimer terr;
    const double xnorm = mess::frobenius_norm(x);
    const mess::ErrorReport err_mess = mess::reconstruction_errors(
        x, mess_basis, eps_abs, mess::RelativeErrorNorm::FrobeniusNorm, xnorm,
        opt.common.threads);
    const mess::ErrorReport err_pod = mess::reconstruction_errors(
        x, pod, eps_abs, mess::RelativeErrorNorm::FrobeniusNorm, xnorm,
        opt.common.threads);
    timing["errors"] = terr.seconds();

    mess_branch["errors"] = mess::error_report_json(err_mess);
    svd_branch["errors"] = mess::error_report_json(err_pod);
    report["mess"] = std::move(mess_branch);
    report["svd"] = std::move(svd_branch);
    report["ell"] = ell;
    report["svd_over_mess_cpu"] =
        (t_selection + t_qr) > 0.0 ? t_svd / (t_selection + t_qr) : 0.0;
    return finish_report(report, std::move(timing), out);
}

struct SweepOpts {
    CommonOpts common;
    InputOpts input;
    std::string grid = "0.01:0.25:0.01";
    double rank_tol = 1e-12;
};

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> eps;
    const auto push_checked = [&eps](double v) {
        if (!std::isfinite(v) || v <= 0.0 || v > 1.0) {
            throw mess::ParameterError(
                "sweep epsilon values must lie in (0, 1]");
        }
        eps.push_back(v);
    };
    if (spec.find(':') != std::string::npos) {
        double a = 0.0;
        double b = 0.0;
        double s = 0.0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3 || s <= 0.0) {
            throw mess::ParameterError("bad sweep grid '" + spec +
                                       "', expected start:end:step");
        }
        for (double v = a; v <= b + 1e-12; v += s) push_checked(v);
    } else {
        std::size_t pos = 0;
        while (pos < spec.size()) {
            std::size_t next = spec.find(',', pos);
            if (next == std::string::npos) next = spec.size();
            push_checked(std::stod(spec.substr(pos, next - pos)));
            pos = next + 1;
        }
    }
    if (eps.empty()) {
        throw mess::ParameterError("sweep epsilon grid is empty");
    }
    return eps;
}

int cmd_sweep(const SweepOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    json report;
    json timing;
    report["command"] = "sweep";
    const mess::Matrix x = opt.input.load(report, timing);
    const std::vector<double> grid = parse_grid(opt.grid);

    CpuTimer td;
    const double diam = mess::diameter(x, opt.common.threads);
    timing["diameter"] = td.seconds();
    if (diam <= 0.0) {
        throw mess::DegenerateInputError(
            "sample diameter is zero; relative epsilon is undefined");
    }
    report["diameter"] = diam;

    std::string csv = "eps,eps_abs,ell,max_abs_error,max_rel_error,cpu_seconds\n";
    json rows = json::array();
    char buf[256];
    for (double eps : grid) {
        CpuTimer tcase;
        const double eps_abs = eps * diam;
        const mess::SampleResult sample = mess::mess_sample(
            x, mess::EpsilonRule::absolute(eps_abs), mess::StopConfig::disabled(),
            opt.common.threads);
        const mess::ReducedBasis basis =
            mess::orthonormalize(sample.selected_snapshots, opt.rank_tol);
        const mess::ErrorReport errors = mess::reconstruction_errors(
            x, basis, eps_abs, mess::RelativeErrorNorm::Diameter, diam,
            opt.common.threads);
        const double secs = tcase.seconds();
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%.17g,%.17g,%.6f\n",
                      eps, eps_abs, basis.ell, errors.max_abs, errors.max_rel,
                      secs);
        csv += buf;
        rows.push_back({{"eps", eps},
                        {"eps_abs", eps_abs},
                        {"ell", basis.ell},
                        {"max_abs_error", errors.max_abs},
                        {"max_rel_error", errors.max_rel}});
    }
    std::ofstream csv_out(out / "sweep.csv", std::ios::trunc);
    if (!csv_out) {
        throw mess::IoError("cannot open '" + (out / "sweep.csv").string() +
                            "' for writing");
    }
    csv_out << csv;
    csv_out.flush();
    if (!csv_out) {
        throw mess::IoError("write to '" + (out / "sweep.csv").string() +
                            "' failed");
    }
    report["rows"] = std::move(rows);
    return finish_report(report, std::move(timing), out);
}

struct RomOpts {
    CommonOpts common;
    mess::BrusselatorConfig brusselator;
    double eps = 0.05;
    double rank_tol = 1e-12;
};

int cmd_rom(const RomOpts& opt) {
    const fs::path out = opt.common.out;
    ensure_out_dir(out);
    json report;
    json timing;
    report["command"] = "rom";
    report["params"] = {{"grid_points", opt.brusselator.grid_points},
                        {"alpha", opt.brusselator.alpha},
                        {"t_end", opt.brusselator.t_end},
                        {"n_snapshots", opt.brusselator.n_snapshots},
                        {"dt_internal", opt.brusselator.dt_internal},
                        {"eps", opt.eps}};

    CpuTimer tg;
    const mess::Matrix x = mess::gen_brusselator(opt.brusselator);
    timing["generate"] = tg.seconds();

    CpuTimer ts;
    const mess::SampleResult sample =
        mess::mess_sample(x, mess::EpsilonRule::relative(opt.eps),
                          mess::StopConfig::disabled(), opt.common.threads);
    mess::ReducedBasis mess_basis =
        mess::orthonormalize(sample.selected_snapshots, opt.rank_tol);
    timing["mess_basis"] = ts.seconds();

    // both models run at the same size, so cap at the numerical rank of the
    // snapshot matrix and truncate the sampled basis if it is larger
    CpuTimer tp;
    const mess::SvdFactors factors = mess::svd(x);
    const double tol = mess::rank_threshold(factors, x.rows(), x.cols());
    std::size_t rank = 0;
    for (double s : factors.sigma) {
        if (s > tol) ++rank;
    }
    const std::size_t ell = std::min(mess_basis.ell, rank);
    if (ell == 0) {
        throw mess::DegenerateInputError("snapshot matrix is numerically zero");
    }
    if (mess_basis.ell > ell) {
        std::vector<std::size_t> keep(ell);
        for (std::size_t k = 0; k < ell; ++k) keep[k] = k;
        mess_basis.q = mess_basis.q.select_columns(keep);
        mess_basis.ell = ell;
    }
    report["epsilon_abs"] = sample.epsilon_abs;
    report["ell"] = ell;
    report["n_selected"] = sample.selected.size();

    const mess::ReducedBasis pod =
        mess::pod_basis(x, mess::BasisSize{ell});
    timing["pod_basis"] = tp.seconds();

    CpuTimer tr;
    const mess::RomTrajectories mess_rom =
        mess::galerkin_rom_demo(opt.brusselator, mess_basis);
    const mess::RomTrajectories pod_rom =
        mess::galerkin_rom_demo(opt.brusselator, pod);
    timing["integrate"] = tr.seconds();

    std::string csv = "t,mess_rel_error,pod_rel_error\n";
    char buf[160];
    double max_mess = 0.0;
    double max_pod = 0.0;
    for (std::size_t k = 0; k < mess_rom.times.size(); ++k) {
        const double xnorm = mess::euclidean_norm(mess_rom.full.col_span(k));
        const double em =
            mess::euclidean_distance(mess_rom.full.col_span(k),
                                     mess_rom.lifted.col_span(k)) /
            xnorm;
        const double ep =
            mess::euclidean_distance(pod_rom.full.col_span(k),
                                     pod_rom.lifted.col_span(k)) /
            xnorm;
        max_mess = std::max(max_mess, em);
        max_pod = std::max(max_pod, ep);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mess_rom.times[k],
                      em, ep);
        csv += buf;
    }
    std::ofstream csv_out(out / "rom_error.csv", std::ios::trunc);
    if (!csv_out) {
        throw mess::IoError("cannot open '" +
                            (out / "rom_error.csv").string() +
                            "' for writing");
    }
    csv_out << csv;
    csv_out.flush();
    if (!csv_out) {
        throw mess::IoError("write to '" + (out / "rom_error.csv").string() +
                            "' failed");
    }

    report["max_rel_error"] = {{"mess", max_mess}, {"pod", max_pod}};
    report["trajectories_finite"] = mess_rom.lifted.all_finite() &&
                                    pod_rom.lifted.all_finite();
    return finish_report(report, std::move(timing), out);
}

void add_brusselator_options(CLI::App* cmd, mess::BrusselatorConfig& cfg) {
    cmd->add_option("--grid-points", cfg.grid_points,
                    "Interior grid points (state dimension is twice this)");
    cmd->add_option("--alpha", cfg.alpha, "Diffusion coefficient");
    cmd->add_option("--t-end", cfg.t_end, "Final time");
    cmd->add_option("--n-snapshots", cfg.n_snapshots, "Snapshot count");
    cmd->add_option("--dt", cfg.dt_internal, "Internal integrator step bound");
}

void add_common_options(CLI::App* cmd, CommonOpts& common) {
    cmd->add_option("--out", common.out, "Output directory")->required();
    cmd->add_option("--threads", common.threads, "Worker thread count")
        ->envname("MESS_THREADS")
        ->check(CLI::PositiveNumber);
}

void add_input_options(CLI::App* cmd, InputOpts& input) {
    cmd->add_option("--input", input.input, "Snapshot matrix file")->required();
    cmd->add_option("--format", input.format, "Input format")
        ->check(CLI::IsMember({"auto", "csv", "bin", "messbin", "pgm"}));
}

void add_eps_options(CLI::App* cmd, EpsOpts& eps) {
    cmd->add_option("--eps", eps.eps, "Sampling radius epsilon")->required();
    cmd->add_option("--eps-mode", eps.mode, "Epsilon interpretation")
        ->check(CLI::IsMember({"relative", "absolute"}));
}

void add_stop_options(CLI::App* cmd, StopOpts& stop) {
    auto* flag = cmd->add_flag("--stop", "Enable the plateau stop rule");
    auto* tol = cmd->add_option("--stop-tol", stop.tol,
                                "Plateau tolerance on the potential");
    auto* window =
        cmd->add_option("--stop-window", stop.window, "Plateau window length");
    cmd->parse_complete_callback([&stop, flag, tol, window]() {
        stop.enabled =
            flag->count() > 0 || tol->count() > 0 || window->count() > 0;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum entropy snapshot sampling toolkit"};
    app.require_subcommand(1);

    GenOpts gen_opts;
    auto* gen = app.add_subcommand("gen", "Generate snapshot datasets");
    add_common_options(gen, gen_opts.common);
    gen->add_option("--kind", gen_opts.kind, "Dataset kind")
        ->check(CLI::IsMember({"brusselator", "random-walk"}));
    gen->add_option("--output-format", gen_opts.format, "Snapshot file format")
        ->check(CLI::IsMember({"csv", "bin", "messbin", "pgm"}));
    add_brusselator_options(gen, gen_opts.brusselator);
    gen->add_option("--m", gen_opts.walk_m, "Random walk dimension");
    gen->add_option("--n", gen_opts.walk_n, "Random walk length");
    gen->add_option("--step-scale", gen_opts.walk_step, "Random walk step scale");
    gen->add_option("--seed", gen_opts.walk_seed, "Random walk seed");

    SampleOpts sample_opts;
    auto* sample =
        app.add_subcommand("sample", "Select a maximum entropy snapshot subset");
    add_common_options(sample, sample_opts.common);
    add_input_options(sample, sample_opts.input);
    add_eps_options(sample, sample_opts.eps);
    add_stop_options(sample, sample_opts.stop);

    BasisOpts basis_opts;
    auto* basis =
        app.add_subcommand("basis", "Sample and orthonormalize a reduced basis");
    add_common_options(basis, basis_opts.common);
    add_input_options(basis, basis_opts.input);
    add_eps_options(basis, basis_opts.eps);
    add_stop_options(basis, basis_opts.stop);
    basis->add_option("--rank-tol", basis_opts.rank_tol,
                      "Rank tolerance for the orthonormalization");

    CompressOpts compress_opts;
    auto* compress = app.add_subcommand(
        "compress", "Sample, build a basis, and reconstruct the input");
    add_common_options(compress, compress_opts.common);
    add_input_options(compress, compress_opts.input);
    add_eps_options(compress, compress_opts.eps);
    add_stop_options(compress, compress_opts.stop);
    compress->add_option("--rank-tol", compress_opts.rank_tol,
                         "Rank tolerance for the orthonormalization");
    compress->add_option("--rel-norm", compress_opts.rel_norm,
                         "Relative error normalization")
        ->check(CLI::IsMember({"diameter", "frobenius"}));

    CompareOpts compare_opts;
    auto* compare = app.add_subcommand(
        "compare", "Time MESS + QR against a truncated SVD at equal size");
    add_common_options(compare, compare_opts.common);
    add_input_options(compare, compare_opts.input);
    add_eps_options(compare, compare_opts.eps);
    compare->add_option("--rank-tol", compare_opts.rank_tol,
                        "Rank tolerance for the orthonormalization");

    SweepOpts sweep_opts;
    auto* sweep = app.add_subcommand(
        "sweep", "Sample across a grid of relative epsilon values");
    add_common_options(sweep, sweep_opts.common);
    add_input_options(sweep, sweep_opts.input);
    sweep->add_option("--eps-grid", sweep_opts.grid,
                      "start:end:step or comma-separated relative values");
    sweep->add_option("--rank-tol", sweep_opts.rank_tol,
                      "Rank tolerance for the orthonormalization");

    RomOpts rom_opts;
    auto* rom = app.add_subcommand(
        "rom", "Galerkin reduced-order model demo on the Brusselator");
    add_common_options(rom, rom_opts.common);
    add_brusselator_options(rom, rom_opts.brusselator);
    rom->add_option("--eps", rom_opts.eps, "Relative sampling radius");
    rom->add_option("--rank-tol", rom_opts.rank_tol,
                    "Rank tolerance for the orthonormalization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    int threads = 1;
    if (*gen) threads = gen_opts.common.threads;
    if (*sample) threads = sample_opts.common.threads;
    if (*basis) threads = basis_opts.common.threads;
    if (*compress) threads = compress_opts.common.threads;
    if (*compare) threads = compare_opts.common.threads;
    if (*sweep) threads = sweep_opts.common.threads;
    if (*rom) threads = rom_opts.common.threads;
    const std::string blas_threads = std::to_string(threads);
    setenv("OPENBLAS_NUM_THREADS", blas_threads.c_str(), 1);
    setenv("OMP_NUM_THREADS", blas_threads.c_str(), 1);

    try {
        if (*gen) return cmd_gen(gen_opts);
        if (*sample) return cmd_sample(sample_opts);
        if (*basis) return cmd_basis(basis_opts);
        if (*compress) return cmd_compress(compress_opts);
        if (*compare) return cmd_compare(compare_opts);
        if (*sweep) return cmd_sweep(sweep_opts);
        if (*rom) return cmd_rom(rom_opts);
    } catch (const mess::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const mess::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const mess::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const mess::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

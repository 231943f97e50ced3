#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "handeye/harness.hpp"
#include "handeye/io.hpp"

namespace {

using namespace handeye;

struct SolveFlags {
    std::string input;
    std::string output;
    double gamma = 2e-6;
    double tol_noiseless = 1e-6;
    std::string canonicalize_axis;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("input", f.input, "pose-pair file (JSON)")->required();
    cmd->add_option("-o,--output", f.output, "write the result file here");
    cmd->add_option("--gamma", f.gamma, "translation-stage regularization weight");
    cmd->add_option("--tol-noiseless", f.tol_noiseless, "per-pair threshold for the branch test");
    cmd->add_option("--canonicalize-axis", f.canonicalize_axis,
                    "slide the solution along this axis (only 'z' supported) until t3 = 0");
}

SolveOptions to_options(const SolveFlags& f) {
    if (!f.canonicalize_axis.empty() && f.canonicalize_axis != "z")
        throw BadFlag("--canonicalize-axis: only 'z' is supported");
    if (f.gamma <= 0.0)
        throw BadFlag("--gamma must be positive");
    if (f.tol_noiseless <= 0.0)
        throw BadFlag("--tol-noiseless must be positive");
    SolveOptions opt;
    opt.gamma = f.gamma;
    opt.tol_noiseless = f.tol_noiseless;
    return opt;
}

void print_matrix(const char* name, const Mat4& M) {
    std::printf("%s:\n", name);
    for (int i = 0; i < 4; ++i)
        std::printf("  % .10g % .10g % .10g % .10g\n", M(i, 0), M(i, 1), M(i, 2), M(i, 3));
}

void emit(const ResultFile& r, const std::string& output) {
    std::printf("equation: %s\n", r.equation.c_str());
    std::printf("branch: %s\n", r.branch.c_str());
    if (r.equation == "axzb")
        std::printf("sigma1: %.10g (multiplicity %d)\n", r.sigma1, r.multiplicity);
    else
        std::printf("lambda0: %.10g (multiplicity %d)\n", r.lambda0, r.multiplicity);
    std::printf("residual: %.10g + %.10g eps\n", r.residual_standard, r.residual_infinitesimal);
    print_matrix("X", r.X);
    if (r.has_Z) print_matrix("Z", r.Z);
    if (!output.empty()) {
        write_result(output, r);
        std::printf("result written to %s\n", output.c_str());
    }
}

int run_solve_axxb(const SolveFlags& f) {
    const SolveOptions opt = to_options(f);
    const PosePairFile file = read_pose_pairs(f.input);
    if (file.pairs.empty())
        throw MalformedInput(f.input + ": no pose pairs");

    const MotionSet motions = to_measurements(file.pairs);
    const AxxbSolution sol = axxb::solve(motions, opt);
    Pose X = dq_to_pose(sol.x);
    if (f.canonicalize_axis == "z")
        X = canonicalize_parallel(X, Vec3(0.0, 0.0, 1.0));

    ResultFile r;
    r.equation = "axxb";
    r.X = X.homogeneous();
    r.branch = sol.branch == Branch::noiseless ? "noiseless" : "noisy";
    r.lambda0 = sol.lambda0;
    r.multiplicity = sol.multiplicity;
    r.residual_standard = sol.residual.st;
    r.residual_infinitesimal = sol.residual.in;
    r.gamma = sol.gamma;
    emit(r, f.output);
    return 0;
}

int run_solve_axzb(const SolveFlags& f) {
    const SolveOptions opt = to_options(f);
    const PosePairFile file = read_pose_pairs(f.input);
    if (file.pairs.empty())
        throw MalformedInput(f.input + ": no pose pairs");
    if (file.pairs.size() == 1)
        std::fprintf(stderr,
                     "warning: a single measurement underdetermines the problem; proceeding\n");

    const MeasurementSet meas = to_measurements(file.pairs);
    const AxzbSolution sol = axzb::solve(meas, opt);
    Pose X = dq_to_pose(sol.x);
    Pose Z = dq_to_pose(sol.z);
    if (f.canonicalize_axis == "z")
        std::tie(X, Z) = canonicalize_parallel(X, Z, Vec3(0.0, 0.0, 1.0));

    ResultFile r;
    r.equation = "axzb";
    r.X = X.homogeneous();
    r.has_Z = true;
    r.Z = Z.homogeneous();
    r.branch = sol.branch == Branch::noiseless ? "noiseless" : "noisy";
    r.sigma1 = sol.sigma1;
    r.multiplicity = sol.multiplicity;
    r.residual_standard = sol.residual.st;
    r.residual_infinitesimal = sol.residual.in;
    r.gamma = sol.gamma;
    emit(r, f.output);
    return 0;
}

Pose pose_from_blocks(const Mat4& T) {
    Pose p;
    p.R = T.topLeftCorner<3, 3>();
    p.t = T.topRightCorner<3, 1>();
    return p;
}

int run_generate(const std::string& fixture, int n, std::uint64_t seed, bool as_motions,
                 const std::string& output) {
    GroundTruth gt;
    std::vector<Pose> A;
    if (fixture == "benchmark-nonparallel") {
        gt = benchmark_ground_truth();
        A = benchmark_nonparallel_As();
    } else if (fixture == "benchmark-parallel") {
        gt = benchmark_ground_truth();
        A = benchmark_parallel_As();
    } else if (fixture == "random") {
        if (n < 2)
            throw BadFlag("--count must be at least 2");
        const RandomFixture fix = random_fixture(n, seed);
        gt = fix.gt;
        A = fix.A;
    } else {
        throw UnknownFixture("unknown fixture: " + fixture +
                             " (expected benchmark-nonparallel, benchmark-parallel, or random)");
    }

    std::vector<std::pair<Pose, Pose>> pairs = make_pose_pairs(gt, A);
    if (as_motions) {
        std::vector<std::pair<Pose, Pose>> motions;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                const Mat4 Am = pairs[i].first.homogeneous().inverse() *
                                pairs[j].first.homogeneous();
                const Mat4 Bm = pairs[i].second.homogeneous().inverse() *
                                pairs[j].second.homogeneous();
                motions.push_back({pose_from_blocks(Am), pose_from_blocks(Bm)});
            }
        }
        pairs = std::move(motions);
    }
    write_pose_pairs(output, pairs);
    std::printf("wrote %zu pairs to %s\n", pairs.size(), output.c_str());
    return 0;
}

int run_sweep(const std::string& equation, double sigma_max, double sigma_step, int runs,
              std::uint64_t seed, double gamma, double tol_noiseless,
              const std::string& output) {
    SweepConfig cfg;
    if (equation == "axxb")
        cfg.equation = SweepConfig::Equation::axxb;
    else if (equation == "axzb")
        cfg.equation = SweepConfig::Equation::axzb;
    else
        throw BadFlag("--equation must be axxb or axzb");
    if (sigma_step <= 0.0)
        throw BadFlag("--sigma-step must be positive");
    if (sigma_max < 0.0)
        throw BadFlag("--sigma-max must be nonnegative");
    if (runs <= 0)
        throw BadFlag("--runs must be positive");
    cfg.sigma_max = sigma_max;
    cfg.sigma_step = sigma_step;
    cfg.runs = runs;
    cfg.seed = seed;
    cfg.options.gamma = gamma;
    cfg.options.tol_noiseless = tol_noiseless;

    const std::string csv = sweep_to_csv(robustness_sweep(cfg));
    if (output.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::FILE* fp = std::fopen(output.c_str(), "w");
        if (!fp)
            throw MalformedInput("cannot open output file: " + output);
        std::fputs(csv.c_str(), fp);
        std::fclose(fp);
        std::printf("sweep written to %s\n", output.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hand-eye calibration by two-stage dual-quaternion optimization"};
    app.require_subcommand(1);

    SolveFlags axxb_flags;
    CLI::App* solve_axxb = app.add_subcommand(
        "solve-axxb", "solve A X = X B from a file of relative-motion pose pairs");
    add_solve_flags(solve_axxb, axxb_flags);

    SolveFlags axzb_flags;
    CLI::App* solve_axzb = app.add_subcommand(
        "solve-axzb", "solve A X = Z B from a file of measurement pose pairs");
    add_solve_flags(solve_axzb, axzb_flags);

    std::string fixture = "benchmark-nonparallel";
    int count = 4;
    std::uint64_t gen_seed = 0;
    bool as_motions = false;
    std::string gen_output;
    CLI::App* generate = app.add_subcommand("generate", "write a pose-pair fixture file");
    generate->add_option("--fixture", fixture,
                         "benchmark-nonparallel, benchmark-parallel, or random");
    generate->add_option("-n,--count", count, "number of measurements (random fixture)");
    generate->add_option("--seed", gen_seed, "random fixture seed");
    generate->add_flag("--as-motions", as_motions,
                       "emit the n(n-1)/2 relative motions instead of raw measurements");
    generate->add_option("-o,--output", gen_output, "output file")->required();

    std::string equation = "axxb";
    double sigma_max = 0.02, sigma_step = 0.002;
    int runs = 10;
    std::uint64_t sweep_seed = 0;
    double sweep_gamma = 2e-6, sweep_tol = 1e-6;
    std::string sweep_output;
    CLI::App* sweep = app.add_subcommand("sweep", "noise-robustness sweep on the benchmark scenario");
    sweep->add_option("--equation", equation, "axxb or axzb");
    sweep->add_option("--sigma-max", sigma_max, "largest noise level");
    sweep->add_option("--sigma-step", sigma_step, "noise-level increment");
    sweep->add_option("--runs", runs, "runs averaged per noise level");
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_option("--gamma", sweep_gamma, "translation-stage regularization weight");
    sweep->add_option("--tol-noiseless", sweep_tol, "per-pair threshold for the branch test");
    sweep->add_option("-o,--output", sweep_output, "CSV output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (solve_axxb->parsed()) return run_solve_axxb(axxb_flags);
        if (solve_axzb->parsed()) return run_solve_axzb(axzb_flags);
        if (generate->parsed()) return run_generate(fixture, count, gen_seed, as_motions, gen_output);
        return run_sweep(equation, sigma_max, sigma_step, runs, sweep_seed, sweep_gamma,
                         sweep_tol, sweep_output);
    } catch (const handeye::CalibrationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        const bool validation = dynamic_cast<const MalformedInput*>(&e) ||
                                dynamic_cast<const NotARotation*>(&e) ||
                                dynamic_cast<const TooFewMeasurements*>(&e) ||
                                dynamic_cast<const UnknownFixture*>(&e) ||
                                dynamic_cast<const BadFlag*>(&e);
        return validation ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}

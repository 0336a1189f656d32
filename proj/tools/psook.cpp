// psook: design and simulation tool for probabilistically shaped OOK.
//
// Subcommands: rates, select-rate, threshold, search, lift, simulate.
// All outputs are deterministic for a fixed seed; the PSOOK_WORKERS
// environment variable overrides the worker count of `simulate`.

#include <CLI11.hpp>

#include "psook/codefile.hpp"
#include "psook/desearch.hpp"
#include "psook/sha256.hpp"
#include "psook/sim.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// "lo:step:hi" (inclusive, fuzz on the last point) or "a,b,c".
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> grid;
    if (s.find(':') != std::string::npos) {
        double lo, step, hi;
        if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 || step <= 0.0)
            throw CLI::ValidationError("grid", "expected lo:step:hi with step > 0");
        for (double v = lo; v <= hi + 0.5 * step; v += step) grid.push_back(v);
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            grid.push_back(std::stod(tok));
        }
    }
    if (grid.empty()) throw CLI::ValidationError("grid", "empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw CLI::ValidationError("grid", "grid must be ascending");
    return grid;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("list", "empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

int resolve_workers(int cli_value) {
    if (const char* env = std::getenv("PSOOK_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
        std::fprintf(stderr, "ignoring invalid PSOOK_WORKERS=%s\n", env);
    }
    return cli_value >= 1 ? cli_value : 1;
}

void check_rc(double rc_flag, double rc_design) {
    if (rc_flag > 0.0 && std::abs(rc_flag - rc_design) > 1e-3) {
        char msg[128];
        std::snprintf(msg, sizeof(msg), "--rc %.6g does not match the matrix design rate %.6g",
                      rc_flag, rc_design);
        throw std::runtime_error(msg);
    }
}

// ---- rates ----------------------------------------------------------------

int cmd_rates(int case_id, double rc, const std::string& rc_set, const std::string& snr,
              const std::string& out_path) {
    std::vector<double> grid = parse_grid(snr);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    if (!rc_set.empty()) {
        psook::emit_rate_curves(out, case_id, parse_list(rc_set), grid);
    } else {
        if (rc <= 0.0 || rc >= 1.0) throw std::runtime_error("rates: need --rc in (0,1) or --rc-set");
        out << "es_n0_db,rate_ts,p1,amp_s,amp_u\n";
        char line[192];
        for (double es : grid) {
            const psook::SnrPoint snr = psook::SnrPoint::from_db(es);
            psook::TsOptimum opt = case_id == 1 ? psook::optimize_ts_case1(rc, snr)
                                                : psook::optimize_ts_case2(rc, snr);
            std::snprintf(line, sizeof(line), "%.6f,%.9f,%.9f,%.9f,%.9f\n", es, opt.rate, opt.p1,
                          opt.amp_shaped, opt.amp_uniform);
            out << line;
        }
    }
    if (!out.good()) throw std::runtime_error("write failed: " + out_path);
    std::printf("wrote %s (%zu points)\n", out_path.c_str(), grid.size());
    return 0;
}

// ---- select-rate ----------------------------------------------------------

int cmd_select_rate(double rtx, const std::string& rate_set, int case_id) {
    std::vector<double> rates = parse_list(rate_set);
    psook::RateSelection sel = psook::select_code_rate(rtx, rates, case_id);
    for (const auto& [rc, es] : sel.evaluated) {
        if (std::isfinite(es))
            std::printf("  rc %-6.4g requires es_n0_db %.4f\n", rc, es);
        else
            std::printf("  rc %-6.4g infeasible\n", rc);
    }
    std::printf("rc_opt %.6g\n", sel.rate_code_opt);
    std::printf("es_n0_db %.4f\n", sel.es_n0_db);
    return 0;
}

// ---- threshold ------------------------------------------------------------

int cmd_threshold(const std::string& base_path, int case_id, double rtx, double rc_flag,
                  bool dump_surrogate) {
    psook::BaseMatrix b = psook::load_base_matrix(base_path);
    const double rc = psook::design_rate(b);
    check_rc(rc_flag, rc);
    psook::TsConfig ts = psook::make_ts_config(case_id, rtx, rc);
    double thr = psook::threshold(b, ts);
    if (!std::isfinite(thr)) throw std::runtime_error("no convergence within the search bracket");
    psook::OperatingPoint req = psook::required_snr(rc, rtx, case_id);
    std::printf("threshold_db %.4f\n", thr);
    std::printf("required_db %.4f\n", req.es_n0_db);
    std::printf("gap_db %.4f\n", thr - req.es_n0_db);
    if (dump_surrogate) {
        psook::ChannelAssignment a = psook::make_assignment(b, ts, thr);
        std::printf("p1 %.9f\n", ts.p1);
        std::printf("surrogate_sigma2_tilde %.9g\n", a.shaped.sigma2_tilde);
        std::printf("surrogate_amp %.9f\n", a.shaped.amp);
        std::printf("surrogate_cond_entropy %.9f\n", a.shaped.cond_entropy);
        std::printf("surrogate_llr_variance %.9f\n", a.shaped.llr_variance());
        std::printf("uniform_sigma2 %.9g\n", a.sigma2_uniform);
        std::printf("uniform_llr_variance %.9f\n", 2.0 / a.sigma2_uniform);
    }
    return 0;
}

// ---- search ---------------------------------------------------------------

int cmd_search(int m, int n, const std::string& punctured, int case_id, double rtx, double rc_flag,
               uint64_t seed, int generations, const std::string& out_path) {
    std::vector<int> punct = parse_int_list(punctured);
    const double rc =
        static_cast<double>(n - m) / static_cast<double>(n - static_cast<int>(punct.size()));
    check_rc(rc_flag, rc);
    psook::TsConfig ts = psook::make_ts_config(case_id, rtx, rc);
    psook::DeParams params;
    params.generations = generations;
    params.rng_seed = seed;
    psook::DeResult res =
        psook::de_optimize(m, n, punct, ts, params, [](int gen, double best) {
            std::printf("gen %d best %.4f dB\n", gen, best);
            std::fflush(stdout);
        });
    psook::save_base_matrix(out_path, res.best.base);
    psook::OperatingPoint req = psook::required_snr(rc, rtx, case_id);
    std::printf("threshold_db %.4f\n", res.best.fitness);
    std::printf("gap_db %.4f\n", res.best.fitness - req.es_n0_db);
    std::printf("evaluations %lld cache_hits %lld\n",
                static_cast<long long>(res.stats.evaluations),
                static_cast<long long>(res.stats.cache_hits));
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

// ---- lift -----------------------------------------------------------------

int cmd_lift(const std::string& base_path, int q, uint64_t seed, const std::string& out_path) {
    psook::BaseMatrix b = psook::load_base_matrix(base_path);
    psook::LiftedCode code = psook::lift(b, q, seed);
    psook::save_lift_descriptor(out_path, code);
    std::printf("n_full %d m %d n_tx %d rate %.6f\n", code.n_full(), code.m(), code.n_tx(),
                code.rate_code());
    std::printf("cycles4 %llu\n", static_cast<unsigned long long>(psook::count_4cycles(code)));
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimArgs {
    std::string base_path, lift_path, out_path, manifest_path;
    int q = 0;
    uint64_t lift_seed = 1;
    int case_id = 1;
    double rtx = 0.25;
    std::string eb_grid;
    uint64_t min_errors = 100, max_frames = 1000000;
    uint64_t seed = 1;
    int bp_iters = 100;
    int workers = 1;
    bool no_matcher = false;
    bool resume = false;
};

std::string format_record(const psook::CerRecord& r) {
    char line[320];
    std::snprintf(line, sizeof(line), "%.4f,%.4f,%llu,%llu,%.8g,%.3f,%.6f,%.6f,%.4f,%.8g,%.8g\n",
                  r.eb_n0_db, r.es_n0_db, static_cast<unsigned long long>(r.frames),
                  static_cast<unsigned long long>(r.frame_errors), r.cer, r.mean_iterations,
                  r.rtx_nominal, r.rtx_realized, r.eb_realized_db, r.wilson_lo, r.wilson_hi);
    return line;
}

const char* kCerHeader =
    "eb_n0_db,es_n0_db,frames,frame_errors,cer,mean_iterations,"
    "rtx_nominal,rtx_realized,eb_realized_db,wilson_lo,wilson_hi\n";

int cmd_simulate(const SimArgs& a) {
    psook::LiftedCode code;
    nlohmann::ordered_json source;
    if (!a.lift_path.empty()) {
        code = psook::load_lift_descriptor(a.lift_path);
        source["lift_file"] = a.lift_path;
        source["lift_sha256"] = psook::sha256_file_hex(a.lift_path);
    } else {
        if (a.base_path.empty() || a.q <= 0)
            throw std::runtime_error("simulate: need --lift or --base with --q");
        psook::BaseMatrix b = psook::load_base_matrix(a.base_path);
        code = psook::lift(b, a.q, a.lift_seed);
        source["base_file"] = a.base_path;
        source["base_sha256"] = psook::sha256_file_hex(a.base_path);
        source["q"] = a.q;
        source["lift_seed"] = a.lift_seed;
    }
    psook::TsConfig ts = psook::make_ts_config(a.case_id, a.rtx, code.rate_code());
    psook::FramePlan plan = psook::make_frame_plan(code, ts, !a.no_matcher);
    std::vector<double> grid = parse_grid(a.eb_grid);
    psook::StopRule stop{a.min_errors, a.max_frames};
    const int workers = resolve_workers(a.workers);

    // Resume: rows already present must be the leading grid points, in order.
    std::vector<std::string> keep;
    size_t done = 0;
    if (a.resume) {
        std::ifstream in(a.out_path);
        std::string line;
        if (in && std::getline(in, line)) {
            if (line + "\n" != kCerHeader) throw std::runtime_error("resume: header mismatch");
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                double eb = std::stod(line);
                if (done >= grid.size() || std::abs(eb - grid[done]) > 1e-9)
                    throw std::runtime_error("resume: existing rows do not match the grid");
                keep.push_back(line + "\n");
                ++done;
            }
        }
    }

    std::ofstream out(a.out_path);
    if (!out) throw std::runtime_error("cannot open " + a.out_path);
    out << kCerHeader;
    for (const auto& line : keep) out << line;
    out.flush();

    std::vector<double> todo(grid.begin() + static_cast<long>(done), grid.end());
    std::string csv_body;
    auto on_point = [&](const psook::CerRecord& r) {
        out << format_record(r);
        out.flush();
        std::fprintf(stderr, "eb %.4f dB: %llu/%llu errors, cer %.3g\n", r.eb_n0_db,
                     static_cast<unsigned long long>(r.frame_errors),
                     static_cast<unsigned long long>(r.frames), r.cer);
    };
    if (!todo.empty())
        psook::run_cer(plan, todo, stop, a.seed, workers, a.bp_iters, on_point,
                       static_cast<uint64_t>(done));
    if (!out.good()) throw std::runtime_error("write failed: " + a.out_path);
    out.close();

    nlohmann::ordered_json manifest;
    manifest["tool"] = "psook simulate";
    manifest["source"] = source;
    manifest["case"] = a.case_id;
    manifest["rtx_nominal"] = a.rtx;
    manifest["rate_code"] = code.rate_code();
    manifest["n_full"] = code.n_full();
    manifest["n_tx"] = code.n_tx();
    manifest["matcher"] = !a.no_matcher;
    manifest["input_bits"] = plan.input_length();
    manifest["rtx_realized"] = plan.rtx_realized();
    manifest["eb_grid_db"] = grid;
    manifest["min_frame_errors"] = a.min_errors;
    manifest["max_frames"] = a.max_frames;
    manifest["seed"] = a.seed;
    manifest["bp_max_iter"] = a.bp_iters;
    // basename only: the manifest lives next to the CSV and stays valid
    // (and byte-reproducible) wherever the pair is copied
    manifest["records_csv"] = std::filesystem::path(a.out_path).filename().string();
    manifest["csv_sha256"] = psook::sha256_file_hex(a.out_path);
    std::string mpath = a.manifest_path.empty() ? a.out_path + ".manifest.json" : a.manifest_path;
    std::ofstream mf(mpath);
    if (!mf) throw std::runtime_error("cannot open " + mpath);
    mf << manifest.dump(2) << "\n";
    if (!mf.good()) throw std::runtime_error("write failed: " + mpath);
    std::printf("wrote %s and %s\n", a.out_path.c_str(), mpath.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"design and simulation tool for probabilistically shaped OOK"};
    app.require_subcommand(1);

    int case_id = 1;
    double rc = 0.0, rtx = 0.25;
    std::string snr, out_path, rc_set, rate_set, base_path, punctured;
    uint64_t seed = 1;
    bool dump_surrogate = false;
    int m = 3, n = 9, generations = 500, q = 0;

    auto* rates = app.add_subcommand("rates", "achievable TS rate curves over an Es/N0 grid");
    rates->add_option("--case", case_id, "TS case (1 or 2)")->check(CLI::Range(1, 2));
    rates->add_option("--rc", rc, "single code rate: per-point optimum CSV");
    rates->add_option("--rc-set", rc_set, "comma list of code rates: multi-curve CSV");
    rates->add_option("--snr-db", snr, "Es/N0 grid, lo:step:hi or comma list")->required();
    rates->add_option("--out", out_path, "output CSV")->required();
    rates->add_option("--seed", seed, "unused; kept for interface uniformity");

    auto* sel = app.add_subcommand("select-rate", "pick the code rate minimizing required Es/N0");
    sel->add_option("--rtx", rtx, "transmission rate in bpcu")->required();
    sel->add_option("--rate-set", rate_set, "comma list of candidate code rates")->required();
    sel->add_option("--case", case_id, "TS case (1 or 2)")->check(CLI::Range(1, 2));
    sel->add_option("--seed", seed, "unused; kept for interface uniformity");

    auto* thr = app.add_subcommand("threshold", "P-EXIT decoding threshold of a base matrix");
    thr->add_option("--base", base_path, "base matrix file")->required();
    thr->add_option("--case", case_id, "TS case (1 or 2)")->check(CLI::Range(1, 2));
    thr->add_option("--rtx", rtx, "transmission rate in bpcu")->required();
    thr->add_option("--rc", rc, "expected code rate (checked against the matrix)");
    thr->add_flag("--dump-surrogate", dump_surrogate, "print surrogate channel internals");
    thr->add_option("--seed", seed, "unused; kept for interface uniformity");

    auto* search = app.add_subcommand("search", "differential-evolution base matrix search");
    search->add_option("--m", m, "base matrix rows")->required();
    search->add_option("--n", n, "base matrix columns")->required();
    search->add_option("--punctured", punctured, "comma list of punctured columns");
    search->add_option("--case", case_id, "TS case (1 or 2)")->check(CLI::Range(1, 2));
    search->add_option("--rtx", rtx, "transmission rate in bpcu")->required();
    search->add_option("--rc", rc, "expected code rate (checked against m, n, punctured)");
    search->add_option("--seed", seed, "DE master seed");
    search->add_option("--generations", generations, "DE generations");
    search->add_option("--out", out_path, "output base matrix file")->required();

    SimArgs sa;
    auto* lift = app.add_subcommand("lift", "lift a base matrix to a QC code descriptor");
    lift->add_option("--base", base_path, "base matrix file")->required();
    lift->add_option("--q", q, "lifting factor")->required();
    lift->add_option("--seed", seed, "shift selection seed");
    lift->add_option("--out", out_path, "output descriptor JSON")->required();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo CER over an Eb/N0 grid");
    sim->add_option("--base", sa.base_path, "base matrix file (with --q)");
    sim->add_option("--q", sa.q, "lifting factor");
    sim->add_option("--lift-seed", sa.lift_seed, "lift shift seed");
    sim->add_option("--lift", sa.lift_path, "lift descriptor JSON (alternative to --base)");
    sim->add_option("--case", sa.case_id, "TS case (1 or 2)")->check(CLI::Range(1, 2));
    sim->add_option("--rtx", sa.rtx, "nominal transmission rate in bpcu")->required();
    sim->add_option("--eb-db", sa.eb_grid, "Eb/N0 grid, lo:step:hi or comma list")->required();
    sim->add_option("--min-errors", sa.min_errors, "frame errors per point");
    sim->add_option("--max-frames", sa.max_frames, "frame cap per point");
    sim->add_option("--seed", sa.seed, "master simulation seed");
    sim->add_option("--bp-iters", sa.bp_iters, "BP iteration cap");
    sim->add_option("--workers", sa.workers, "decoder threads (PSOOK_WORKERS overrides)");
    sim->add_flag("--no-matcher", sa.no_matcher, "uniform signaling, bypass the matcher");
    sim->add_flag("--resume", sa.resume, "keep completed grid points in --out");
    sim->add_option("--out", sa.out_path, "output CSV")->required();
    sim->add_option("--manifest", sa.manifest_path, "manifest JSON path (default <out>.manifest.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rates->parsed()) return cmd_rates(case_id, rc, rc_set, snr, out_path);
        if (sel->parsed()) return cmd_select_rate(rtx, rate_set, case_id);
        if (thr->parsed()) return cmd_threshold(base_path, case_id, rtx, rc, dump_surrogate);
        if (search->parsed())
            return cmd_search(m, n, punctured, case_id, rtx, rc, seed, generations, out_path);
        if (lift->parsed()) return cmd_lift(base_path, q, seed, out_path);
        if (sim->parsed()) return cmd_simulate(sa);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

#include "ndist/bench.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ndist {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t pair_seed(std::uint64_t seed, int depth, int run, int side) {
    std::uint64_t x = seed;
    x = splitmix64(x ^ static_cast<std::uint64_t>(depth));
    x = splitmix64(x ^ (static_cast<std::uint64_t>(run) << 16));
    x = splitmix64(x ^ (static_cast<std::uint64_t>(side) << 32));
    return x;
}

}  // namespace

BenchReport run_bench(const BenchConfig& cfg) {
    if (cfg.depths.empty()) throw std::invalid_argument("bench: depths must be nonempty");
    if (cfg.runs < 1) throw std::invalid_argument("bench: runs must be >= 1");
    if (cfg.timing_reps < 1)
        throw std::invalid_argument("bench: timing_reps must be >= 1");

    EntropicOptions eo;
    eo.gamma_divisor = cfg.gamma_divisor;
    eo.tol = cfg.sinkhorn_tol;
    eo.max_iter = cfg.sinkhorn_max_iter;
    eo.log_domain = cfg.sinkhorn_log_domain;

    auto make_tree = [&cfg](int depth, std::uint64_t seed) {
        GenSpec gs;
        gs.depth = depth;
        gs.max_children = cfg.max_children;
        gs.value_dim = cfg.value_dim;
        gs.seed = seed;
        gs.increment_scale = cfg.increment_scale;
        return generate(gs);
    };

    BenchReport report;
    for (int depth : cfg.depths) {
        // One untimed warm-up per depth.
        {
            const auto wx = make_tree(depth, pair_seed(cfg.seed, depth, -1, 0));
            const auto wy = make_tree(depth, pair_seed(cfg.seed, depth, -1, 1));
            nested_distance(wx, wy, cfg.r, cfg.threads);
            entropic_nested_distance(wx, wy, cfg.r, eo, cfg.threads);
        }

        double sum_nd_ms = 0.0, sum_end_ms = 0.0, sum_rel = 0.0;
        int ok = 0;
        for (int run = 0; run < cfg.runs; ++run) {
            const auto tx = make_tree(depth, pair_seed(cfg.seed, depth, run, 0));
            const auto ty = make_tree(depth, pair_seed(cfg.seed, depth, run, 1));
            try {
                // Best-of-reps timing; the solves are deterministic, so only
                // the clock readings differ between repeats.
                NDResult nd = nested_distance(tx, ty, cfg.r, cfg.threads);
                NDResult en = entropic_nested_distance(tx, ty, cfg.r, eo, cfg.threads);
                double nd_ms = nd.wall_time.count() * 1e3;
                double end_ms = en.wall_time.count() * 1e3;
                for (int rep = 1; rep < cfg.timing_reps; ++rep) {
                    nd_ms = std::min(
                        nd_ms,
                        nested_distance(tx, ty, cfg.r, cfg.threads).wall_time.count() * 1e3);
                    end_ms = std::min(
                        end_ms, entropic_nested_distance(tx, ty, cfg.r, eo, cfg.threads)
                                        .wall_time.count() * 1e3);
                }
                BenchPair pr;
                pr.depth = depth;
                pr.run = run;
                pr.time_nd_ms = nd_ms;
                pr.time_end_ms = end_ms;
                pr.nd = nd.value;
                pr.end_value = en.value;
                pr.relative_error_pct =
                    en.value > 0.0 ? 100.0 * (en.value - nd.value) / en.value : 0.0;
                report.pairs.push_back(pr);
                sum_nd_ms += pr.time_nd_ms;
                sum_end_ms += pr.time_end_ms;
                sum_rel += pr.relative_error_pct;
                ++ok;
            } catch (const std::exception& e) {
                report.warnings.push_back("depth " + std::to_string(depth) + ", run " +
                                          std::to_string(run) + " failed: " + e.what());
            }
        }
        if (ok == 0) continue;
        BenchRow row;
        row.depth = depth;
        row.mean_time_nd_ms = sum_nd_ms / ok;
        row.mean_time_end_ms = sum_end_ms / ok;
        row.speedup = row.mean_time_nd_ms / row.mean_time_end_ms;
        row.relative_error_pct = sum_rel / ok;
        report.rows.push_back(row);
    }

    if (!cfg.output.empty()) write_bench_csv(report, cfg.output);
    return report;
}

void write_bench_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# relative_error_pct = 100 * (END - ND) / END, averaged over runs\n";
    out << "depth,mean_time_nd_ms,mean_time_end_ms,speedup,relative_error_pct\n";
    out.precision(17);
    for (const BenchRow& r : report.rows)
        out << r.depth << ',' << r.mean_time_nd_ms << ',' << r.mean_time_end_ms << ','
            << r.speedup << ',' << r.relative_error_pct << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);

    std::ofstream raw(path + ".raw.csv");
    if (!raw) throw std::runtime_error("cannot open " + path + ".raw.csv for writing");
    raw << "depth,run,time_nd_ms,time_end_ms,nd,end,relative_error_pct\n";
    raw.precision(17);
    for (const BenchPair& p : report.pairs)
        raw << p.depth << ',' << p.run << ',' << p.time_nd_ms << ',' << p.time_end_ms
            << ',' << p.nd << ',' << p.end_value << ',' << p.relative_error_pct << '\n';
    if (!raw) throw std::runtime_error("write failed for " + path + ".raw.csv");
}

std::vector<BenchRow> read_bench_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<BenchRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "depth,mean_time_nd_ms,mean_time_end_ms,speedup,relative_error_pct")
                throw std::runtime_error(path + ": unexpected CSV header: " + line);
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        BenchRow r;
        char comma;
        if (!(ss >> r.depth >> comma >> r.mean_time_nd_ms >> comma >>
              r.mean_time_end_ms >> comma >> r.speedup >> comma >> r.relative_error_pct))
            throw std::runtime_error(path + ": malformed CSV row: " + line);
        rows.push_back(r);
    }
    if (!header_seen) throw std::runtime_error(path + ": missing CSV header");
    return rows;
}

}  // namespace ndist

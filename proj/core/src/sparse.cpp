#include "sdom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "sdom/calculus.hpp"
#include "sdom/errors.hpp"

namespace sdom {

namespace {

std::int64_t norm_index(std::int64_t x, std::int64_t n) {
    return ((x % n) + n) % n;
}

DyadicCube as_grid0_cube(const Interval& q) {
    const Rational len = q.length();
    if (len.num() != 1)
        throw NotDyadic("cube length is not a power of two: " + q.str());
    const std::int64_t den = len.den();
    if ((den & (den - 1)) != 0)
        throw NotDyadic("cube length is not a power of two: " + q.str());
    int level = 0;
    while ((std::int64_t{1} << level) < den) ++level;
    if (level > kMaxDepth)
        throw NotDyadic("cube is below the grid depth limit: " + q.str());
    const Rational idx = q.left() / len;
    if (idx.den() != 1)
        throw NotDyadic("cube is not aligned to the standard grid: " + q.str());
    return DyadicCube{0, level, idx.num()};
}

// Offsets of a subcube's samples within the node's sample block. Grid-0
// subcubes of a grid-0 node are contiguous and never wrap relative to it.
std::int64_t offset_in(const SampleRange& node, std::int64_t first,
                       std::int64_t n) {
    return norm_index(first - node.first, n);
}

// The maximal proper dyadic subcubes P of `node` with
// 4 |P cap marked| > |P|, via descent from the children. `prefix` holds
// partial sums of the marked indicator over the node's sample block.
std::vector<DyadicCube> select_heavy_subcubes(const DyadicCube& node,
                                              const SampleRange& node_sr,
                                              const std::vector<std::int64_t>& prefix,
                                              std::int64_t n) {
    std::vector<DyadicCube> picked;
    const auto count_in = [&](const SampleRange& sc) {
        const std::int64_t off = offset_in(node_sr, sc.first, n);
        return prefix[static_cast<std::size_t>(off + sc.count)] -
               prefix[static_cast<std::size_t>(off)];
    };
    const auto descend = [&](auto&& self, const DyadicCube& c) -> void {
        for (const DyadicCube& child : children(c)) {
            const SampleRange sc = to_interval(child).sample_range(n);
            if (sc.count == 0) continue;
            const std::int64_t cnt = count_in(sc);
            if (cnt * 4 > sc.count) {
                picked.push_back(child);
            } else if (cnt > 0 && sc.count > 1 && child.level < kMaxDepth) {
                self(self, child);
            }
        }
    };
    descend(descend, node);
    return picked;
}

bool cube_order(const DyadicCube& a, const DyadicCube& b) {
    return std::pair(a.level, a.index) < std::pair(b.level, b.index);
}

} // namespace

double sparse_apply(const Signal& f, const SparseFamily& fam, double p,
                    std::int64_t x) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    const Rational pos(norm_index(x, n), n);
    double acc = 0.0;
    for (const Interval& q : fam.cubes)
        if (q.contains(pos)) acc += lp_average(f, q, p);
    return acc;
}

double sparse_apply_dilated(const Signal& f, const std::vector<Interval>& raw,
                            const std::vector<Interval>& dilated, double s,
                            std::int64_t x) {
    if (raw.size() != dilated.size())
        throw std::domain_error("raw/dilated size mismatch");
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    const Rational pos(norm_index(x, n), n);
    double acc = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (raw[i].contains(pos)) acc += lp_average(f, dilated[i], s);
    return acc;
}

LernerResult lerner_decompose(const Signal& f, const Interval& q0,
                              double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::domain_error("lerner lambda must lie in (0,1)");
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    const DyadicCube root = as_grid0_cube(q0);

    LernerResult res;
    res.lambda = lambda;
    res.root_median = median(f, q0);

    std::vector<DyadicCube> stack{root};
    while (!stack.empty()) {
        const DyadicCube q = stack.back();
        stack.pop_back();
        const Interval qi = to_interval(q);
        const SampleRange sr = qi.sample_range(n);
        if (sr.count == 0) continue;
        res.cubes.push_back(q);
        res.omega.push_back(oscillation(f, qi, lambda));
        if (sr.count == 1) continue;

        const double med = median(f, qi);
        std::vector<double> dev(static_cast<std::size_t>(sr.count));
        for (std::int64_t t = 0; t < sr.count; ++t)
            dev[static_cast<std::size_t>(t)] = std::abs(
                f.samples[static_cast<std::size_t>((sr.first + t) % n)] - med);
        const std::int64_t allowed =
            count_floor(lambda * qi.measure().to_double() * static_cast<double>(n));
        double tau = 0.0;
        if (allowed < sr.count) {
            std::vector<double> sorted = dev;
            std::nth_element(sorted.begin(),
                             sorted.begin() + static_cast<std::ptrdiff_t>(allowed),
                             sorted.end(), std::greater<double>());
            tau = sorted[static_cast<std::size_t>(allowed)];
        }
        std::vector<std::int64_t> prefix(static_cast<std::size_t>(sr.count) + 1, 0);
        for (std::int64_t t = 0; t < sr.count; ++t)
            prefix[static_cast<std::size_t>(t + 1)] =
                prefix[static_cast<std::size_t>(t)] +
                (dev[static_cast<std::size_t>(t)] > tau ? 1 : 0);
        if (prefix.back() == 0) continue;

        for (const DyadicCube& p : select_heavy_subcubes(q, sr, prefix, n))
            stack.push_back(p);
    }

    std::vector<std::size_t> order(res.cubes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cube_order(res.cubes[a], res.cubes[b]);
    });
    std::vector<DyadicCube> cubes;
    std::vector<double> omega;
    std::vector<Interval> arcs;
    cubes.reserve(order.size());
    omega.reserve(order.size());
    arcs.reserve(order.size());
    for (std::size_t i : order) {
        cubes.push_back(res.cubes[i]);
        omega.push_back(res.omega[i]);
        arcs.push_back(to_interval(res.cubes[i]));
    }
    res.cubes = std::move(cubes);
    res.omega = std::move(omega);
    res.family = SparseFamily(Rational(1, 2), std::move(arcs));
    return res;
}

namespace {

// Per-node data that does not depend on the threshold A, cached across
// the AUTO doubling sweeps.
struct NodeEval {
    double avg = 0.0;               // <f>_{s, Q*}
    std::vector<double> m_over;     // M_s(f chi_Q*) / c0 at the node's samples
    std::vector<double> o_over;     // max(|op|, sharp)(f chi_Q*) at the samples
};

struct RunFailure {
    bool failed = false;
    bool single_sample = false;
    bool ms_driven = false; // the maximal-function branch alone is too big
    bool at_root = false;
};

} // namespace

DominationResult sparse_dominate(const Signal& f, const OperatorHandle& op,
                                 const Interval& q, const DominationConfig& cfg) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    if (cfg.alpha < 3 || cfg.alpha % 2 == 0)
        throw std::domain_error("alpha must be an odd integer >= 3");
    if (cfg.s < 1.0) throw std::domain_error("s must be >= 1");
    if (cfg.c0 <= 0.0) throw std::domain_error("c0 must be positive");
    if (cfg.A && *cfg.A <= 0.0) throw std::domain_error("A must be positive");
    const DyadicCube root = as_grid0_cube(q);
    const SampleRange root_sr = q.sample_range(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t off = norm_index(i - root_sr.first, n);
        if (off >= root_sr.count && f.samples[static_cast<std::size_t>(i)] != 0.0)
            throw std::domain_error("signal must be supported inside the root cube");
    }

    std::map<std::pair<int, std::int64_t>, NodeEval> memo;
    const auto eval_node = [&](const DyadicCube& c, const Interval& ci,
                               const SampleRange& sr) -> const NodeEval& {
        const auto key = std::pair(c.level, c.index);
        const auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        NodeEval ev;
        const Interval qstar = ci.dilate(cfg.alpha);
        const Signal g = restrict_to(f, qstar);
        ev.avg = lp_average(g, qstar, cfg.s);
        if (ev.avg > 0.0) {
            const std::vector<double> ms = maximal_r_all(g, cfg.s);
            const std::vector<double> opv = op.eval_all(g);
            const std::vector<double> sharp =
                grand_sharp_on_range(g, op.eval_all, cfg.alpha, cfg.sharp, sr);
            ev.m_over.resize(static_cast<std::size_t>(sr.count));
            ev.o_over.resize(static_cast<std::size_t>(sr.count));
            for (std::int64_t t = 0; t < sr.count; ++t) {
                const auto i = static_cast<std::size_t>((sr.first + t) % n);
                ev.m_over[static_cast<std::size_t>(t)] = ms[i] / cfg.c0;
                ev.o_over[static_cast<std::size_t>(t)] =
                    std::max(std::abs(opv[i]), sharp[static_cast<std::size_t>(t)]);
            }
        }
        return memo.emplace(key, std::move(ev)).first->second;
    };

    std::vector<DyadicCube> tree;
    int depth_reached = 0;
    const auto run = [&](double A) -> RunFailure {
        tree.clear();
        depth_reached = 0;
        std::vector<std::pair<DyadicCube, int>> stack{{root, 0}};
        while (!stack.empty()) {
            const auto [c, depth] = stack.back();
            stack.pop_back();
            const Interval ci = to_interval(c);
            const SampleRange sr = ci.sample_range(n);
            if (sr.count == 0) continue;
            tree.push_back(c);
            depth_reached = std::max(depth_reached, depth);
            const NodeEval& ev = eval_node(c, ci, sr);
            if (ev.avg == 0.0) continue; // f vanishes on Q*: nothing to control
            std::vector<std::int64_t> prefix(static_cast<std::size_t>(sr.count) + 1,
                                             0);
            std::int64_t cnt = 0;
            std::int64_t cnt_ms = 0;
            for (std::int64_t t = 0; t < sr.count; ++t) {
                const auto ut = static_cast<std::size_t>(t);
                const bool ms_hit = ev.m_over[ut] > ev.avg;
                const bool in_omega = ms_hit || ev.o_over[ut] > A * ev.avg;
                cnt += in_omega ? 1 : 0;
                cnt_ms += ms_hit ? 1 : 0;
                prefix[ut + 1] = prefix[ut] + (in_omega ? 1 : 0);
            }
            if (cnt > sr.count / 8) {
                RunFailure fail;
                fail.failed = true;
                fail.single_sample = sr.count == 1;
                fail.ms_driven = cnt_ms > sr.count / 8;
                fail.at_root = c == root;
                return fail;
            }
            if (sr.count == 1 || cnt == 0) continue;
            for (const DyadicCube& p : select_heavy_subcubes(c, sr, prefix, n))
                stack.emplace_back(p, depth + 1);
        }
        return {};
    };

    double A = 0.0;
    if (cfg.A) {
        A = *cfg.A;
        const RunFailure fail = run(A);
        if (fail.failed) {
            if (fail.single_sample)
                throw ResolutionFloor(
                    "single-sample cube fails the measure bound at A=" +
                    std::to_string(A));
            throw CalibrationFailure("threshold A=" + std::to_string(A) +
                                     " is too small");
        }
    } else {
        A = cfg.auto_a0;
        bool ok = false;
        RunFailure last;
        for (int round = 0; round <= cfg.max_doublings; ++round) {
            last = run(A);
            if (!last.failed) {
                ok = true;
                break;
            }
            // The maximal-function branch ignores A; failing at the root,
            // which every sweep must visit, can never be repaired.
            if (last.ms_driven && last.at_root)
                throw CalibrationFailure(
                    "exceptional set stays too large at any A; raise c0");
            A *= 2.0;
        }
        if (!ok) {
            if (last.single_sample)
                throw ResolutionFloor("single-sample cube still failing at the "
                                      "doubling cap");
            throw CalibrationFailure("AUTO threshold search exhausted " +
                                     std::to_string(cfg.max_doublings) +
                                     " doublings");
        }
    }

    DominationResult res;
    res.threshold_a = A;
    res.node_count = static_cast<std::int64_t>(tree.size());
    res.recursion_depth = depth_reached;
    std::sort(tree.begin(), tree.end(), cube_order);
    res.cubes = tree;
    res.raw.reserve(tree.size());
    res.dilated.reserve(tree.size());
    res.covers.reserve(tree.size());
    const Rational sixth(1, 6);
    for (const DyadicCube& c : tree) {
        const Interval ci = to_interval(c);
        res.raw.push_back(ci);
        res.dilated.push_back(ci.dilate(cfg.alpha));
        if (res.dilated.back().length() <= sixth)
            res.covers.emplace_back(shifted_cover(res.dilated.back()));
        else
            res.covers.emplace_back(std::nullopt);
    }
    res.family = SparseFamily(Rational(1, 2), res.raw);
    res.packing = sparseness_check(res.family);
    if (!res.packing.certified)
        throw Error("internal: emitted family failed its packing certificate");

    // Empirical domination constant over the root cube: operator applied
    // to f chi_root* against the dilated sparse sum.
    const Signal g_root = restrict_to(f, q.dilate(cfg.alpha));
    const std::vector<double> num = op.eval_all(g_root);
    std::vector<double> den(static_cast<std::size_t>(root_sr.count), 0.0);
    for (const DyadicCube& c : res.cubes) {
        const SampleRange sc = to_interval(c).sample_range(n);
        const double avg = memo.at(std::pair(c.level, c.index)).avg;
        const std::int64_t off0 = offset_in(root_sr, sc.first, n);
        for (std::int64_t t = 0; t < sc.count; ++t)
            den[static_cast<std::size_t>(off0 + t)] += avg;
    }
    for (std::int64_t t = 0; t < root_sr.count; ++t) {
        const auto i = static_cast<std::size_t>((root_sr.first + t) % n);
        const double nv = std::abs(num[i]);
        const double dv = den[static_cast<std::size_t>(t)];
        if (dv == 0.0) {
            if (nv == 0.0) {
                ++res.skipped;
                continue;
            }
            throw Error("internal: positive operator value with empty sparse sum");
        }
        const double ratio = nv / dv;
        if (ratio > res.c_empirical) {
            res.c_empirical = ratio;
            res.argmax = (root_sr.first + t) % n;
        }
    }
    return res;
}

VerificationReport verify_domination(const Signal& f,
                                     const std::vector<double>& op_values,
                                     const DominationResult& res, double s) {
    const std::int64_t n = f.n();
    if (static_cast<std::int64_t>(op_values.size()) != n)
        throw std::domain_error("op_values resolution mismatch");
    if (res.cubes.empty()) throw std::domain_error("empty domination result");

    VerificationReport rep;
    rep.packing_certified = sparseness_check(res.family).certified;

    // cubes are (level, index)-sorted, so the root sits in front
    const Interval root = res.raw.front();
    const SampleRange root_sr = root.sample_range(n);
    std::vector<double> den(static_cast<std::size_t>(root_sr.count), 0.0);
    for (std::size_t ci = 0; ci < res.cubes.size(); ++ci) {
        const SampleRange sc = res.raw[ci].sample_range(n);
        const double avg = lp_average(f, res.dilated[ci], s);
        const std::int64_t off0 = offset_in(root_sr, sc.first, n);
        for (std::int64_t t = 0; t < sc.count; ++t)
            den[static_cast<std::size_t>(off0 + t)] += avg;
    }
    std::vector<double> ratios(static_cast<std::size_t>(root_sr.count), -1.0);
    for (std::int64_t t = 0; t < root_sr.count; ++t) {
        const auto i = static_cast<std::size_t>((root_sr.first + t) % n);
        const double nv = std::abs(op_values[i]);
        const double dv = den[static_cast<std::size_t>(t)];
        if (dv == 0.0 && nv == 0.0) {
            ++rep.skipped;
            continue;
        }
        const double ratio = dv == 0.0 ? HUGE_VAL : nv / dv;
        ratios[static_cast<std::size_t>(t)] = ratio;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.argmax = (root_sr.first + t) % n;
        }
    }
    rep.histogram.assign(16, 0);
    if (rep.max_ratio > 0.0) {
        for (double ratio : ratios) {
            if (ratio < 0.0) continue;
            const auto bin = static_cast<std::size_t>(std::min(
                15.0, std::floor(ratio / rep.max_ratio * 16.0)));
            ++rep.histogram[bin];
        }
    }
    return rep;
}

} // namespace sdom

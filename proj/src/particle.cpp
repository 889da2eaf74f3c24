#include "edg/particle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "edg/errors.hpp"
#include "edg/rng.hpp"

namespace edg {

void MicroState::check() const {
    long s0 = 0, s1 = 0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] < 0) throw RangeError("MicroState: negative count");
        s0 += n[k];
        s1 += static_cast<long>(k) * n[k];
    }
    if (s0 < 1) throw RangeError("MicroState: at least one cluster is required");
    if (s0 != L || s1 != N) {
        std::ostringstream os;
        os << "MicroState: counts give L=" << s0 << ", N=" << s1 << " but state declares L=" << L
           << ", N=" << N;
        throw RangeError(os.str());
    }
}

ClusterDistribution MicroState::empirical() const {
    std::vector<double> p(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) p[k] = static_cast<double>(n[k]) / static_cast<double>(L);
    return ClusterDistribution(std::move(p));
}

MicroState MicroState::from_counts(std::vector<long> n) {
    MicroState s;
    for (std::size_t k = 0; k < n.size(); ++k) {
        s.L += n[k];
        s.N += static_cast<long>(k) * n[k];
    }
    s.n = std::move(n);
    s.check();
    return s;
}

double channel_rate(const MicroState& s, const KernelSpec& kernel, const Perturbation& pert, double t,
                    int k, int l1) {
    const int M = s.M();
    if (k < 1 || k > M || l1 < 0 || l1 > M) throw RangeError("channel_rate: index outside window");
    if (l1 + 1 > M) return 0.0;
    if (s.L < 2) return 0.0;
    const double nk = static_cast<double>(s.n[k]);
    const double nl = static_cast<double>(s.n[l1]) - (k == l1 ? 1.0 : 0.0);
    if (nk <= 0.0 || nl <= 0.0) return 0.0;
    return nk * nl * forward_kernel(kernel, pert, t, k, l1) / static_cast<double>(s.L - 1);
}

double total_rate(const MicroState& s, const KernelSpec& kernel, const Perturbation& pert, double t) {
    double r = 0.0;
    for (int k = 1; k <= s.M(); ++k) {
        if (s.n[k] == 0) continue;
        for (int l1 = 0; l1 < s.M(); ++l1) r += channel_rate(s, kernel, pert, t, k, l1);
    }
    return r;
}

double total_rate_bound(const MicroState& s, double c_k1, double b_sup) {
    const double rho = static_cast<double>(s.N) / static_cast<double>(s.L);
    const double L = static_cast<double>(s.L);
    return 2.0 * c_k1 * std::exp(b_sup) * rho * (rho + 1.0) * L / (L - 1.0) * L;
}

namespace {

class Engine {
public:
    Engine(MicroState s, const KernelSpec& kernel) : s_(std::move(s)), K_(kernel), M_(s_.M()) {
        pos_.assign(M_ + 1, -1);
        S_.assign(M_ + 1, 0.0);
        for (int k = 0; k <= M_; ++k)
            if (s_.n[k] > 0) activate(k);
        refresh();
    }

    const MicroState& state() const { return s_; }

    double row(int k) const {
        double r = S_[k];
        if (k <= M_ - 1) r -= K_.at(k, k);
        return std::max(0.0, static_cast<double>(s_.n[k]) * r);
    }

    double row_total() const {
        double r = 0.0;
        for (int k : active_)
            if (k >= 1) r += row(k);
        return r;
    }

    // channel drawn proportionally to n_k (n_j - delta) Kbar(k, j)
    std::pair<int, int> draw(double total, StreamRng& rng) const {
        double u = rng.uniform() * total;
        int k = -1;
        for (int a : active_) {
            if (a < 1) continue;
            const double r = row(a);
            if (r <= 0.0) continue;
            k = a;
            if (u < r) break;
            u -= r;
        }
        double v = rng.uniform();
        double rk = 0.0;
        for (int j : active_) {
            if (j > M_ - 1) continue;
            rk += (static_cast<double>(s_.n[j]) - (j == k ? 1.0 : 0.0)) * K_.at(k, j);
        }
        v *= rk;
        int jsel = -1;
        for (int j : active_) {
            if (j > M_ - 1) continue;
            const double w = (static_cast<double>(s_.n[j]) - (j == k ? 1.0 : 0.0)) * K_.at(k, j);
            if (w <= 0.0) continue;
            jsel = j;
            if (v < w) break;
            v -= w;
        }
        return {k, jsel};
    }

    void jump(int k, int j) {
        int sizes[4] = {k, k - 1, j, j + 1};
        int deltas[4] = {-1, +1, -1, +1};
        std::vector<char> was_active(4);
        for (int q = 0; q < 4; ++q) s_.n[sizes[q]] += deltas[q];
        // net change per distinct size
        int ns = 0;
        int us[4], ud[4];
        for (int q = 0; q < 4; ++q) {
            int f = -1;
            for (int r = 0; r < ns; ++r)
                if (us[r] == sizes[q]) f = r;
            if (f < 0) {
                us[ns] = sizes[q];
                ud[ns] = deltas[q];
                ++ns;
            } else {
                ud[f] += deltas[q];
            }
        }
        std::vector<int> fresh;
        for (int r = 0; r < ns; ++r) {
            const int sz = us[r];
            if (ud[r] == 0) continue;
            if (s_.n[sz] > 0 && pos_[sz] < 0) {
                activate(sz);
                fresh.push_back(sz);
            } else if (s_.n[sz] == 0 && pos_[sz] >= 0) {
                deactivate(sz);
            }
        }
        for (int a : active_) {
            if (a < 1) continue;
            if (std::find(fresh.begin(), fresh.end(), a) != fresh.end()) {
                S_[a] = fresh_sum(a);
                continue;
            }
            for (int r = 0; r < ns; ++r)
                if (ud[r] != 0 && us[r] <= M_ - 1) S_[a] += ud[r] * K_.at(a, us[r]);
        }
        if (++since_refresh_ >= 1024) refresh();
    }

    int max_cluster() const {
        int m = 0;
        for (int a : active_) m = std::max(m, a);
        return m;
    }

private:
    void activate(int k) {
        pos_[k] = static_cast<int>(active_.size());
        active_.push_back(k);
    }
    void deactivate(int k) {
        const int p = pos_[k];
        const int last = active_.back();
        active_[p] = last;
        pos_[last] = p;
        active_.pop_back();
        pos_[k] = -1;
    }
    double fresh_sum(int k) const {
        double s = 0.0;
        for (int j : active_)
            if (j <= M_ - 1) s += static_cast<double>(s_.n[j]) * K_.at(k, j);
        return s;
    }
    void refresh() {
        for (int a : active_)
            if (a >= 1) S_[a] = fresh_sum(a);
        since_refresh_ = 0;
    }

    MicroState s_;
    const KernelSpec& K_;
    int M_;
    std::vector<int> active_;
    std::vector<int> pos_;
    std::vector<double> S_;
    int since_refresh_ = 0;
};

}  // namespace

SimResult simulate(const MicroState& state0, const KernelSpec& kernel, const Perturbation& pert,
                   double T, std::uint64_t seed, std::uint64_t stream, const SimOptions& opt) {
    state0.check();
    const int M = state0.M();
    if (kernel.m_max() < M) throw RangeError("simulate: kernel table shorter than window");
    if (state0.L < 2) throw RangeError("simulate: L must be at least 2");
    const double ebs = std::exp(pert.sup_norm());
    if (!std::isfinite(ebs)) throw RangeError("simulate: perturbation bound overflows the majorant");
    std::vector<double> outs = opt.output_times;
    if (outs.empty()) outs = {0.0, T};
    std::sort(outs.begin(), outs.end());

    SimResult res;
    res.record.M = M;
    res.record.L = state0.L;
    res.record.T = T;
    if (opt.record_counts) res.record.counts.assign(static_cast<std::size_t>(M) * M, 0);

    StreamRng rng(seed, stream);
    Engine eng(state0, kernel);
    const double inv = state0.L >= 2 ? 1.0 / static_cast<double>(state0.L - 1) : 0.0;
    double t = 0.0;
    std::size_t oi = 0;
    auto snapshot = [&](double when) {
        res.traj.t.push_back(when);
        res.traj.c.push_back(eng.state().empirical().p());
    };
    while (true) {
        const double base = eng.row_total();
        const double rate = base * ebs * inv;
        if (!std::isfinite(rate)) throw RangeError("simulate: rate overflow");
        double tn = rate > 0.0 ? t + rng.exponential(rate) : std::numeric_limits<double>::infinity();
        while (oi < outs.size() && outs[oi] < tn && outs[oi] <= T) snapshot(outs[oi++]);
        if (tn > T) break;
        t = tn;
        auto [k, j] = eng.draw(base, rng);
        ++res.proposals;
        if (k < 1 || j < 0) continue;
        if (!pert.is_zero()) {
            const double p = std::exp(pert(t, k, j) - pert.sup_norm());
            if (rng.uniform() > p) continue;
        }
        eng.jump(k, j);
        ++res.accepted;
        if (opt.record_counts) ++res.record.counts[static_cast<std::size_t>(k - 1) * M + j];
        if (opt.record_events) res.record.events.push_back({t, k, j});
        if (opt.check_invariants) eng.state().check();
    }
    res.final_state = eng.state();
    res.max_cluster_final = eng.max_cluster();
    return res;
}

EnsembleMean ensemble_mean(const std::vector<ClusterDistribution>& measures) {
    if (measures.empty()) throw EmptyError("ensemble_mean: empty list");
    const std::size_t n = measures.front().size();
    for (const auto& m : measures)
        if (m.size() != n) throw RangeError("ensemble_mean: windows differ");
    const double R = static_cast<double>(measures.size());
    std::vector<double> mean(n, 0.0), var(n, 0.0);
    for (const auto& m : measures)
        for (std::size_t k = 0; k < n; ++k) mean[k] += m[k];
    for (double& x : mean) x /= R;
    if (measures.size() > 1) {
        for (const auto& m : measures)
            for (std::size_t k = 0; k < n; ++k) var[k] += (m[k] - mean[k]) * (m[k] - mean[k]);
        for (double& v : var) v = std::sqrt(v / (R - 1.0) / R);
    }
    EnsembleMean out;
    out.mean = ClusterDistribution(std::move(mean));
    out.stderr_vec = std::move(var);
    return out;
}

FluxField empirical_flux_rate(const JumpRecord& rec, double a, double b) {
    if (!(b > a)) throw EmptyError("empirical_flux_rate: empty window");
    if (a < 0.0 || b > rec.T + 1e-12) throw RangeError("empirical_flux_rate: window outside run");
    FluxField f(rec.M);
    const double scale = 1.0 / (static_cast<double>(rec.L) * (b - a));
    if (rec.events.empty()) {
        if (a > 0.0 || b < rec.T - 1e-12) {
            bool any = false;
            for (long c : rec.counts) any = any || c != 0;
            if (any) throw RangeError("empirical_flux_rate: sub-windows need the event log");
        }
        for (int k = 1; k <= rec.M; ++k)
            for (int l1 = 0; l1 < rec.M; ++l1) f.at(k, l1) = rec.count(k, l1) * scale;
        return f;
    }
    for (const auto& e : rec.events)
        if (e.t >= a && e.t < b) f.at(e.k, e.l1) += scale;
    return f;
}

std::vector<SimResult> run_ensemble(const MicroState& state0, const KernelSpec& kernel,
                                    const Perturbation& pert, double T, std::uint64_t seed, int R,
                                    const SimOptions& opt, int threads) {
    if (R < 1) throw EmptyError("run_ensemble: need at least one member");
    std::vector<SimResult> out(R);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next++; i < R; i = next++)
            out[i] = simulate(state0, kernel, pert, T, seed, static_cast<std::uint64_t>(i), opt);
    };
    const int nt = std::max(1, std::min(threads, R));
    if (nt == 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

std::uint64_t kernel_config_hash(const KernelSpec& kernel, const Perturbation& pert) {
    const std::string s = kernel.describe() + "|" + pert.label();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string manifest_json(std::uint64_t seed, long N, long L, double T, const KernelSpec& kernel,
                          const Perturbation& pert, int replicas) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seed"] = seed;
    j["N"] = N;
    j["L"] = L;
    j["T"] = T;
    j["replicas"] = replicas;
    j["rng"] = "splitmix64-counter, stream = replica index";
    std::ostringstream os;
    os << std::hex << kernel_config_hash(kernel, pert);
    j["kernel_config_hash"] = os.str();
    j["kernel"] = kernel.describe();
    j["perturbation"] = pert.label();
    return j.dump(2);
}

}  // namespace edg

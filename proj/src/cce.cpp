#include "spinbath/cce.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>
#include <thread>

#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

struct CellKey {
    int x, y, z;
    bool operator<(const CellKey& o) const { return std::tie(x, y, z) < std::tie(o.x, o.y, o.z); }
};

std::vector<std::vector<int>> neighbour_lists(const std::vector<Eigen::Vector3d>& pos, double cutoff) {
    const int n = static_cast<int>(pos.size());
    std::vector<std::vector<int>> out(n);
    if (n == 0 || !(cutoff > 0.0)) return out;
    std::map<CellKey, std::vector<int>> cells;
    auto key = [&](const Eigen::Vector3d& p) {
        return CellKey{static_cast<int>(std::floor(p.x() / cutoff)), static_cast<int>(std::floor(p.y() / cutoff)),
                       static_cast<int>(std::floor(p.z() / cutoff))};
    };
    for (int i = 0; i < n; ++i) cells[key(pos[i])].push_back(i);
    const double c2 = cutoff * cutoff * (1.0 + 1e-9);
    for (int i = 0; i < n; ++i) {
        const CellKey k = key(pos[i]);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = cells.find({k.x + dx, k.y + dy, k.z + dz});
                    if (it == cells.end()) continue;
                    for (int j : it->second)
                        if (j != i && (pos[i] - pos[j]).squaredNorm() <= c2) out[i].push_back(j);
                }
        std::sort(out[i].begin(), out[i].end());
    }
    return out;
}

template <typename F>
void parallel_for(int n, int workers, F&& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < n; i = next++) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<int> doublet_support(const DonorParameters& p, int i) {
    const AdiabaticState s = state_from_index(p, i);
    const double I = p.spin_host;
    if (std::abs(std::abs(s.m) - (I + 0.5)) < 1e-9) {
        return {s.m > 0 ? zeeman_index(p, 0.5, I) : zeeman_index(p, -0.5, -I)};
    }
    return {zeeman_index(p, 0.5, s.m - 0.5), zeeman_index(p, -0.5, s.m + 0.5)};
}

Mat restrict(const Mat& m, const std::vector<int>& idx) {
    const int n = static_cast<int>(idx.size());
    Mat out(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out(a, b) = m(idx[a], idx[b]);
    return out;
}

Vec restrict(const Vec& v, const std::vector<int>& idx) {
    Vec out(idx.size());
    for (size_t a = 0; a < idx.size(); ++a) out(a) = v(idx[a]);
    return out;
}

}  // namespace

CutoffPolicy CutoffPolicy::defaults() {
    CutoffPolicy p;
    p.pair_separation_max = std::sqrt(11.0) * constants::a0_angstrom / 4.0;
    p.growth_separation_max = p.pair_separation_max;
    return p;
}

void CutoffPolicy::validate() const {
    if (!(pair_separation_max > 0.0) || !(growth_separation_max > 0.0) || !(box_half_side > 0.0))
        throw std::invalid_argument("cutoff policy: distances must be positive");
    if (max_order < 1) throw std::invalid_argument("cutoff policy: max_order must be >= 1");
}

std::string PulseSequence::label() const {
    if (kind == SequenceKind::fid) return "FID";
    if (pulses == 1) return "Hahn";
    return "CPMG" + std::to_string(pulses);
}

std::vector<double> CoherenceTrace::magnitudes() const {
    std::vector<double> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i]);
    return out;
}

std::vector<double> uniform_time_grid(double t_max, int points) {
    if (!(t_max > 0.0) || points < 2) throw std::invalid_argument("time grid: need t_max > 0 and >= 2 points");
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = t_max * i / (points - 1);
    return t;
}

ClusterSet enumerate_clusters(const BathRealisation& bath, const CutoffPolicy& policy) {
    policy.validate();
    std::vector<Eigen::Vector3d> pos;
    std::vector<int> index;
    for (size_t i = 0; i < bath.sites.size(); ++i) {
        const Eigen::Vector3d r = bath.sites[i].position();
        if (r.cwiseAbs().maxCoeff() > policy.box_half_side + 1e-9) continue;
        pos.push_back(r);
        index.push_back(static_cast<int>(i));
    }
    ClusterSet set;
    const int n = static_cast<int>(pos.size());
    for (int i = 0; i < n; ++i) set.clusters.push_back({{index[i]}});
    set.counts[1] = n;
    if (policy.max_order >= 2) {
        const auto pair_nb = neighbour_lists(pos, policy.pair_separation_max);
        std::vector<Cluster> current;
        for (int i = 0; i < n; ++i)
            for (int j : pair_nb[i])
                if (j > i) current.push_back({{index[i], index[j]}});
        std::sort(current.begin(), current.end());
        set.counts[2] = static_cast<long>(current.size());
        set.clusters.insert(set.clusters.end(), current.begin(), current.end());

        std::map<int, int> local;
        for (int i = 0; i < n; ++i) local[index[i]] = i;
        const auto grow_nb = neighbour_lists(pos, policy.growth_separation_max);
        for (int order = 3; order <= policy.max_order; ++order) {
            std::set<std::vector<int>> next;
            for (const auto& c : current) {
                std::set<int> candidates;
                for (int m : c.members)
                    for (int j : grow_nb[local[m]]) candidates.insert(index[j]);
                for (int cand : candidates) {
                    if (std::binary_search(c.members.begin(), c.members.end(), cand)) continue;
                    std::vector<int> grown = c.members;
                    grown.insert(std::upper_bound(grown.begin(), grown.end(), cand), cand);
                    next.insert(grown);
                }
            }
            current.clear();
            for (const auto& m : next) current.push_back({m});
            set.counts[order] = static_cast<long>(current.size());
            set.clusters.insert(set.clusters.end(), current.begin(), current.end());
        }
    }
    return set;
}

ClusterSet all_subsets(int n_spins, int max_order) {
    if (n_spins < 0 || n_spins > 20) throw std::invalid_argument("all_subsets: unsupported bath size");
    ClusterSet set;
    for (unsigned mask = 1; mask < (1u << n_spins); ++mask) {
        Cluster c;
        for (int i = 0; i < n_spins; ++i)
            if (mask & (1u << i)) c.members.push_back(i);
        if (c.order() <= max_order) set.clusters.push_back(c);
    }
    std::sort(set.clusters.begin(), set.clusters.end());
    for (const auto& c : set.clusters) set.counts[c.order()] += 1;
    return set;
}

CceContext::CceContext(const CceProblem& problem) : problem_(problem) {
    const DonorParameters& p = problem_.donor;
    p.validate();
    const int d = p.dimension();
    if (problem_.u == problem_.l || problem_.u < 1 || problem_.l < 1 || problem_.u > d || problem_.l > d)
        throw std::invalid_argument("cce: invalid transition");
    if (problem_.sequence.kind == SequenceKind::cpmg && problem_.sequence.pulses < 1)
        throw std::invalid_argument("cce: CPMG needs at least one pulse");
    if (problem_.times.empty()) throw std::invalid_argument("cce: empty time grid");
    if (problem_.bath.initial_states.size() != problem_.bath.sites.size())
        throw std::invalid_argument("cce: bath states do not match sites");

    if (problem_.truncated_basis) {
        std::set<int> keep;
        for (int i : doublet_support(p, problem_.u)) keep.insert(i);
        for (int i : doublet_support(p, problem_.l)) keep.insert(i);
        donor_basis_.assign(keep.begin(), keep.end());
    } else {
        for (int i = 0; i < d; ++i) donor_basis_.push_back(i);
    }

    const SpinOperatorSet S = build_spin_operators(0.5);
    const Mat idI = Mat::Identity(d / 2, d / 2);
    h_donor_ = restrict(donor_hamiltonian(p, problem_.field), donor_basis_);
    sz_ = restrict(kron(S.sz, idI), donor_basis_);
    sp_ = restrict(kron(S.s_plus, idI), donor_basis_);
    sm_ = restrict(kron(S.s_minus, idI), donor_basis_);
    vec_u_ = restrict(analytic_eigenvector(p, problem_.field, problem_.u), donor_basis_);
    vec_l_ = restrict(analytic_eigenvector(p, problem_.field, problem_.l), donor_basis_);

    const int dc = static_cast<int>(donor_basis_.size());
    pulse_ = Mat::Zero(dc, dc);
    int kept = 0;
    for (int i = 1; i <= d; ++i) {
        const Vec full = analytic_eigenvector(p, problem_.field, i);
        const Vec part = restrict(full, donor_basis_);
        if (std::abs(part.squaredNorm() - 1.0) > 1e-12) continue;
        ++kept;
        if (i == problem_.u || i == problem_.l) continue;
        pulse_ += part * part.adjoint();
    }
    if (kept != dc) throw std::runtime_error("cce: donor basis is not closed under the doublet structure");
    pulse_ += vec_u_ * vec_l_.adjoint() + vec_l_ * vec_u_.adjoint();

    j_.resize(problem_.bath.sites.size());
    for (size_t i = 0; i < j_.size(); ++i) {
        const Eigen::Vector3d r = problem_.bath.sites[i].position();
        j_[i] = problem_.residual_dipolar
                    ? secular_hyperfine(problem_.hyperfine, p.gamma_e, problem_.gamma_n, r, problem_.field_direction)
                    : fermi_contact(problem_.hyperfine, p.gamma_e, problem_.gamma_n, r);
    }

    bare_.assign(problem_.times.size(), cplx(1.0, 0.0));
    bare_ = evolve_states(Cluster{}, {{}}).front();
}

double CceContext::dipolar(int a, int b) const {
    const Eigen::Vector3d r = problem_.bath.sites[a].position() - problem_.bath.sites[b].position();
    return secular_dipolar(problem_.gamma_n, problem_.gamma_n, r, problem_.field_direction);
}

Mat CceContext::reduced_hamiltonian(const Cluster& cluster) const {
    const int k = cluster.order();
    const int nb = 1 << k;
    const int dc = donor_dimension();
    ProductSpace bath_space;
    bath_space.factor_dimensions.assign(k, 2);
    const SpinOperatorSet I = build_spin_operators(0.5);
    Mat h = kron(h_donor_, Mat::Identity(nb, nb));
    if (k == 0) return h;
    std::vector<Mat> iz(k), ip(k), im(k);
    for (int s = 0; s < k; ++s) {
        iz[s] = embed(I.sz, s, bath_space);
        ip[s] = embed(I.s_plus, s, bath_space);
        im[s] = embed(I.s_minus, s, bath_space);
    }
    for (int s = 0; s < k; ++s) {
        const double j = j_.at(cluster.members[s]);
        h += j * kron(sz_, iz[s]);
        if (!problem_.ising_only) h += 0.5 * j * (kron(sp_, im[s]) + kron(sm_, ip[s]));
    }
    const Mat id_c = Mat::Identity(dc, dc);
    for (int s = 0; s < k; ++s)
        for (int t = s + 1; t < k; ++t) {
            const double c = dipolar(cluster.members[s], cluster.members[t]);
            h += kron(id_c, c * (iz[s] * iz[t]) - 0.25 * c * (ip[s] * im[t] + im[s] * ip[t]));
        }
    return h;
}

std::vector<std::vector<cplx>> CceContext::evolve_states(const Cluster& cluster,
                                                         const std::vector<std::vector<int>>& states) const {
    const int k = cluster.order();
    const int nb = 1 << k;
    const int dc = donor_dimension();
    const int D = dc * nb;
    const int ns = static_cast<int>(states.size());
    const HermitianEigensystem eig = eigendecompose(reduced_hamiltonian(cluster));
    const Mat& V = eig.eigenvectors;

    Mat psi0 = Mat::Zero(D, ns);
    const Vec central = (vec_u_ + vec_l_) / std::sqrt(2.0);
    for (int s = 0; s < ns; ++s) {
        if (static_cast<int>(states[s].size()) != k) throw std::invalid_argument("cce: state size mismatch");
        int b = 0;
        for (int q = 0; q < k; ++q) b = 2 * b + (states[s][q] > 0 ? 0 : 1);
        for (int a = 0; a < dc; ++a) psi0(a * nb + b, s) = central(a);
    }
    const Mat phi0 = V.adjoint() * psi0;
    Mat pulse_eig;
    const bool cpmg = problem_.sequence.kind == SequenceKind::cpmg;
    if (cpmg) pulse_eig = V.adjoint() * kron(pulse_, Mat::Identity(nb, nb)) * V;
    const int n_pulses = cpmg ? problem_.sequence.pulses : 0;

    // Projections onto <u| and <l| on the donor factor.
    Mat proj_u = Mat::Zero(nb, D), proj_l = Mat::Zero(nb, D);
    for (int a = 0; a < dc; ++a)
        for (int b = 0; b < nb; ++b) {
            proj_u(b, a * nb + b) = std::conj(vec_u_(a));
            proj_l(b, a * nb + b) = std::conj(vec_l_(a));
        }
    const Mat pu = proj_u * V;
    const Mat pl = proj_l * V;

    std::vector<std::vector<cplx>> out(ns, std::vector<cplx>(problem_.times.size()));
    Vec ph(D);
    Mat phi(D, ns);
    for (size_t ti = 0; ti < problem_.times.size(); ++ti) {
        const double t = problem_.times[ti];
        if (!cpmg) {
            for (int i = 0; i < D; ++i) ph(i) = std::polar(1.0, -eig.eigenvalues(i) * t);
            phi = ph.asDiagonal() * phi0;
        } else {
            const double tau = t / (2.0 * n_pulses);
            for (int i = 0; i < D; ++i) ph(i) = std::polar(1.0, -eig.eigenvalues(i) * tau);
            const Mat cycle = ph.asDiagonal() * pulse_eig * ph.asDiagonal();
            phi = phi0;
            for (int c = 0; c < n_pulses; ++c) phi = cycle * phi;
        }
        const Mat au = pu * phi;
        const Mat al = pl * phi;
        for (int s = 0; s < ns; ++s) {
            const cplx rho = au.col(s).dot(al.col(s));
            out[s][ti] = std::conj(rho) / bare_[ti];
        }
    }
    return out;
}

std::vector<cplx> CceContext::cluster_coherence(const Cluster& cluster, const std::vector<int>& states) const {
    return evolve_states(cluster, {states}).front();
}

std::vector<cplx> CceContext::cluster_coherence_all(const Cluster& cluster, bool coherent) const {
    const int k = cluster.order();
    std::vector<std::vector<int>> states;
    for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<int> s(k);
        for (int q = 0; q < k; ++q) s[q] = (mask >> (k - 1 - q)) & 1 ? -1 : 1;
        states.push_back(s);
    }
    const auto all = evolve_states(cluster, states);
    std::vector<cplx> mean(problem_.times.size(), cplx(0.0, 0.0));
    for (const auto& tr : all)
        for (size_t i = 0; i < tr.size(); ++i) mean[i] += coherent ? tr[i] : cplx(std::abs(tr[i]), 0.0);
    for (auto& v : mean) v /= static_cast<double>(all.size());
    return mean;
}

CombineResult cce_combine(const std::vector<Cluster>& clusters, const std::vector<std::vector<cplx>>& coherences,
                          int k, bool include_order1) {
    if (clusters.size() != coherences.size()) throw std::invalid_argument("cce_combine: size mismatch");
    CombineResult res;
    if (clusters.empty()) return res;
    const size_t nt = coherences.front().size();
    res.values.assign(nt, cplx(1.0, 0.0));
    std::map<std::vector<int>, size_t> where;
    for (size_t c = 0; c < clusters.size(); ++c)
        if (clusters[c].order() <= k) where[clusters[c].members] = c;
    std::vector<std::vector<cplx>> tilde(clusters.size());
    std::vector<size_t> order_idx;
    for (size_t c = 0; c < clusters.size(); ++c)
        if (clusters[c].order() <= k) order_idx.push_back(c);
    std::stable_sort(order_idx.begin(), order_idx.end(),
                     [&](size_t a, size_t b) { return clusters[a] < clusters[b]; });
    for (size_t c : order_idx) {
        const auto& m = clusters[c].members;
        const int size = static_cast<int>(m.size());
        std::vector<cplx> denom(nt, cplx(1.0, 0.0));
        for (unsigned mask = 1; mask + 1 < (1u << size); ++mask) {
            std::vector<int> sub;
            for (int q = 0; q < size; ++q)
                if (mask & (1u << q)) sub.push_back(m[q]);
            auto it = where.find(sub);
            if (it == where.end()) continue;
            const auto& tq = tilde[it->second];
            for (size_t i = 0; i < nt; ++i) denom[i] *= tq[i];
        }
        tilde[c].resize(nt);
        for (size_t i = 0; i < nt; ++i) {
            cplx q = coherences[c][i] / denom[i];
            if (std::abs(denom[i]) < divergence_threshold) {
                if (std::abs(q) > 1.0 || !std::isfinite(std::abs(q))) {
                    q = std::isfinite(std::abs(q)) ? q / std::abs(q) : cplx(1.0, 0.0);
                }
                res.divergent = true;
            }
            tilde[c][i] = q;
        }
        if (size > 1 || include_order1)
            for (size_t i = 0; i < nt; ++i) res.values[i] *= tilde[c][i];
    }
    return res;
}

CoherenceTrace run_cce(const CceProblem& problem, const ClusterSet& set, const CceOptions& options) {
    if (options.order < 1) throw std::invalid_argument("run_cce: order must be >= 1");
    const CceContext ctx(problem);
    std::vector<Cluster> used;
    for (const auto& c : set.clusters)
        if (c.order() <= options.order) used.push_back(c);

    auto states_for = [&](const Cluster& c, const std::vector<int>& global) {
        std::vector<int> s(c.order());
        for (int q = 0; q < c.order(); ++q) s[q] = global[c.members[q]];
        return s;
    };
    auto run_with_states = [&](const std::vector<int>& global) {
        std::vector<std::vector<cplx>> coh(used.size());
        parallel_for(static_cast<int>(used.size()), options.workers,
                     [&](int i) { coh[i] = ctx.cluster_coherence(used[i], states_for(used[i], global)); });
        return cce_combine(used, coh, options.order, options.include_cce1);
    };

    CoherenceTrace trace;
    trace.times = problem.times;
    for (const auto& [order, n] : set.counts)
        if (order <= options.order) trace.cluster_counts[order] = n;

    const AveragingOptions& av = options.averaging;
    if (av.mode == AveragingMode::realisation_state) {
        const auto r = run_with_states(problem.bath.initial_states);
        trace.values = r.values;
        trace.divergent = r.divergent;
    } else if (av.mode == AveragingMode::all_eigenstates) {
        std::vector<std::vector<cplx>> coh(used.size());
        parallel_for(static_cast<int>(used.size()), options.workers,
                     [&](int i) { coh[i] = ctx.cluster_coherence_all(used[i], av.coherent); });
        const auto r = cce_combine(used, coh, options.order, options.include_cce1);
        trace.values = r.values;
        trace.divergent = r.divergent;
    } else {
        if (av.samples < 1) throw std::invalid_argument("run_cce: need at least one sample");
        std::vector<CoherenceTrace> parts;
        for (int s = 0; s < av.samples; ++s) {
            std::mt19937_64 gen(derive_seed(av.seed, static_cast<std::uint64_t>(s)));
            std::vector<int> global(problem.bath.sites.size());
            for (auto& g : global) g = uniform01(gen) < 0.5 ? 1 : -1;
            const auto r = run_with_states(global);
            CoherenceTrace part;
            part.times = problem.times;
            part.values = r.values;
            part.divergent = r.divergent;
            parts.push_back(part);
        }
        const CoherenceTrace mean = average_traces(parts, av.coherent);
        trace.values = mean.values;
        trace.divergent = mean.divergent;
    }
    return trace;
}

CoherenceTrace run_cce(const CceProblem& problem, const CutoffPolicy& policy, const CceOptions& options) {
    CutoffPolicy p = policy;
    p.max_order = std::max(p.max_order, options.order);
    return run_cce(problem, enumerate_clusters(problem.bath, p), options);
}

std::vector<cplx> exact_bath_coherence(const CceProblem& problem) {
    const CceContext ctx(problem);
    Cluster all;
    for (size_t i = 0; i < problem.bath.sites.size(); ++i) all.members.push_back(static_cast<int>(i));
    return ctx.cluster_coherence(all, problem.bath.initial_states);
}

CoherenceTrace average_traces(const std::vector<CoherenceTrace>& traces, bool coherent) {
    if (traces.empty()) throw std::invalid_argument("average_traces: no traces");
    CoherenceTrace out;
    out.times = traces.front().times;
    out.values.assign(out.times.size(), cplx(0.0, 0.0));
    out.cluster_counts = traces.front().cluster_counts;
    for (const auto& tr : traces) {
        if (tr.values.size() != out.values.size()) throw std::invalid_argument("average_traces: grid mismatch");
        for (size_t i = 0; i < tr.values.size(); ++i)
            out.values[i] += coherent ? tr.values[i] : cplx(std::abs(tr.values[i]), 0.0);
        out.divergent = out.divergent || tr.divergent;
    }
    for (auto& v : out.values) v /= static_cast<double>(traces.size());
    return out;
}

CoherenceTrace convolve_field(const std::vector<double>& fields, const std::vector<CoherenceTrace>& traces,
                              double center, double w) {
    if (fields.size() != traces.size() || fields.empty()) throw std::invalid_argument("convolve_field: size mismatch");
    if (!std::is_sorted(fields.begin(), fields.end())) throw std::invalid_argument("convolve_field: fields not sorted");
    if (w < 0.0) throw std::invalid_argument("convolve_field: negative width");
    if (w == 0.0) {
        for (size_t i = 0; i < fields.size(); ++i)
            if (fields[i] == center) return traces[i];
        throw std::invalid_argument("convolve_field: zero width needs the center trace");
    }
    if (fields.front() > center - 3.0 * w || fields.back() < center + 3.0 * w)
        throw std::invalid_argument("convolve_field: field grid must cover +-3w");
    const size_t nb = fields.size();
    std::vector<double> weight(nb, 0.0);
    double norm = 0.0;
    for (size_t i = 0; i < nb; ++i) {
        const double lo = i > 0 ? fields[i - 1] : fields[i];
        const double hi = i + 1 < nb ? fields[i + 1] : fields[i];
        const double g = std::exp(-0.5 * std::pow((fields[i] - center) / w, 2));
        weight[i] = 0.5 * (hi - lo) * g;
        norm += weight[i];
    }
    CoherenceTrace out;
    out.times = traces.front().times;
    out.values.assign(out.times.size(), cplx(0.0, 0.0));
    for (size_t i = 0; i < nb; ++i) {
        if (traces[i].values.size() != out.values.size()) throw std::invalid_argument("convolve_field: grid mismatch");
        for (size_t k = 0; k < out.values.size(); ++k) out.values[k] += weight[i] / norm * traces[i].values[k];
        out.divergent = out.divergent || traces[i].divergent;
    }
    return out;
}

void write_trace_csv(const CoherenceTrace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "time_s,re,im,abs\n";
    for (size_t i = 0; i < trace.times.size(); ++i)
        f << trace.times[i] << ',' << trace.values[i].real() << ',' << trace.values[i].imag() << ','
          << std::abs(trace.values[i]) << '\n';
}

}  // namespace spinbath

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinbath/couplings.hpp"
#include "spinbath/donor.hpp"
#include "spinbath/lattice.hpp"
#include "spinbath/spin_algebra.hpp"

namespace spinbath {

struct Cluster {
    std::vector<int> members;  // sorted bath-site indices

    int order() const { return static_cast<int>(members.size()); }
    bool operator<(const Cluster& o) const {
        if (members.size() != o.members.size()) return members.size() < o.members.size();
        return members < o.members;
    }
    bool operator==(const Cluster& o) const { return members == o.members; }
};

struct CutoffPolicy {
    double pair_separation_max = 4.5020;    // angstrom, sqrt(11) a0 / 4
    double growth_separation_max = 4.5020;  // angstrom
    double box_half_side = 80.0;            // angstrom
    int max_order = 2;

    static CutoffPolicy defaults();
    void validate() const;
};

struct ClusterSet {
    std::vector<Cluster> clusters;  // canonical order: by size, then lexicographic
    std::map<int, long> counts;     // order -> number of clusters
};

enum class SequenceKind { fid, cpmg };

struct PulseSequence {
    SequenceKind kind = SequenceKind::cpmg;
    int pulses = 1;  // Hahn = CPMG with one pulse; FID has none

    static PulseSequence fid() { return {SequenceKind::fid, 0}; }
    static PulseSequence hahn() { return {SequenceKind::cpmg, 1}; }
    static PulseSequence cpmg(int n) { return {SequenceKind::cpmg, n}; }
    std::string label() const;
};

struct CoherenceTrace {
    std::vector<double> times;  // s
    std::vector<cplx> values;
    bool divergent = false;
    std::map<int, long> cluster_counts;

    std::vector<double> magnitudes() const;
};

std::vector<double> uniform_time_grid(double t_max, int points);

struct CceProblem {
    DonorParameters donor;
    double field = 0.0;  // T
    Eigen::Vector3d field_direction = Eigen::Vector3d(1, 0, 0);
    int u = 2, l = 1;
    HyperfineModel hyperfine;
    bool residual_dipolar = false;
    double gamma_n = constants::gamma_si29;
    bool ising_only = true;
    bool truncated_basis = true;
    PulseSequence sequence = PulseSequence::hahn();
    std::vector<double> times;
    BathRealisation bath;
};

enum class AveragingMode { realisation_state, all_eigenstates, sampled };

struct AveragingOptions {
    AveragingMode mode = AveragingMode::all_eigenstates;
    int samples = 1;
    std::uint64_t seed = 0;
    bool coherent = true;
};

struct CceOptions {
    int order = 2;
    bool include_cce1 = false;
    int workers = 1;
    AveragingOptions averaging;
};

ClusterSet enumerate_clusters(const BathRealisation& bath, const CutoffPolicy& policy);
// Every non-empty subset of {0..n-1} up to max_order; small-bath oracle.
ClusterSet all_subsets(int n_spins, int max_order);

inline constexpr double divergence_threshold = 1e-6;

// Precomputed donor data and couplings for one (donor, field, transition, sequence, bath).
class CceContext {
public:
    explicit CceContext(const CceProblem& problem);

    const CceProblem& problem() const { return problem_; }
    int donor_dimension() const { return static_cast<int>(donor_basis_.size()); }
    const std::vector<double>& hyperfine_couplings() const { return j_; }
    double dipolar(int a, int b) const;

    Mat reduced_hamiltonian(const Cluster& cluster) const;

    // L(t) for one product initial state of the cluster (+1 up, -1 down per member),
    // normalised by the bath-free coherence.
    std::vector<cplx> cluster_coherence(const Cluster& cluster, const std::vector<int>& states) const;
    // Averaged over all 2^k product states.
    std::vector<cplx> cluster_coherence_all(const Cluster& cluster, bool coherent) const;

    const Mat& pulse_operator() const { return pulse_; }

private:
    std::vector<std::vector<cplx>> evolve_states(const Cluster& cluster, const std::vector<std::vector<int>>& states) const;

    CceProblem problem_;
    std::vector<int> donor_basis_;  // Zeeman indices kept
    Mat h_donor_, sz_, sp_, sm_;
    Vec vec_u_, vec_l_;
    Mat pulse_;
    std::vector<cplx> bare_;
    std::vector<double> j_;
};

struct CombineResult {
    std::vector<cplx> values;
    bool divergent = false;
};

// L_[k] = prod over clusters of size <= k of the tilde correlations.
CombineResult cce_combine(const std::vector<Cluster>& clusters, const std::vector<std::vector<cplx>>& coherences,
                          int k, bool include_order1 = true);

CoherenceTrace run_cce(const CceProblem& problem, const ClusterSet& clusters, const CceOptions& options);
CoherenceTrace run_cce(const CceProblem& problem, const CutoffPolicy& policy, const CceOptions& options);

// Direct evolution of the whole bath as one cluster in the realisation's initial state.
std::vector<cplx> exact_bath_coherence(const CceProblem& problem);

// Mean of traces (complex, or of moduli when coherent is false).
CoherenceTrace average_traces(const std::vector<CoherenceTrace>& traces, bool coherent = true);

// Gaussian-weighted trapezoid quadrature over the field grid; w is the standard deviation.
CoherenceTrace convolve_field(const std::vector<double>& fields, const std::vector<CoherenceTrace>& traces,
                              double center, double w);

void write_trace_csv(const CoherenceTrace& trace, const std::string& path);

}  // namespace spinbath

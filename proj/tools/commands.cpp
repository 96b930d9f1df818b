#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spinbath/cce.hpp"
#include "spinbath/couplings.hpp"
#include "spinbath/lattice.hpp"
#include "spinbath/pseudospin.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/spectra.hpp"

namespace spinbath::cli {

using json = nlohmann::ordered_json;

namespace {

struct Provenance {
    std::string command;
    const RunConfig* cfg = nullptr;
    std::map<int, long> cluster_counts;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

json config_json(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& k : config_keys()) j[k.name] = cfg.str(k.name);
    return j;
}

json counts_json(const std::map<int, long>& counts) {
    json j = json::object();
    for (const auto& [k, v] : counts) j[std::to_string(k)] = v;
    return j;
}

// Reproducible part of the metadata, shared by CSV headers and JSON outputs.
json stable_metadata(const Provenance& pv) {
    json j;
    j["tool"] = "spinbath-cli";
    j["version"] = tool_version;
    j["command"] = pv.command;
    j["config"] = config_json(*pv.cfg);
    j["seed"] = pv.cfg->str("seed");
    j["rng"] = rng_algorithm_name;
    j["divergence_threshold"] = divergence_threshold;
    j["hahn_regime_threshold"] = hahn_regime_threshold;
    j["cluster_counts"] = counts_json(pv.cluster_counts);
    return j;
}

json full_metadata(const Provenance& pv) {
    json j = stable_metadata(pv);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - pv.start).count();
    j["wall_clock_s"] = secs;
    const std::time_t now = std::time(nullptr);
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    j["finished_utc"] = ts.str();
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string csv_header(const Provenance& pv) {
    std::ostringstream os;
    const json m = stable_metadata(pv);
    os << "# tool: " << m["tool"].get<std::string>() << ' ' << m["version"].get<std::string>() << '\n';
    os << "# command: " << pv.command << '\n';
    os << "# config: " << m["config"].dump() << '\n';
    os << "# seed: " << m["seed"].get<std::string>() << '\n';
    os << "# rng: " << rng_algorithm_name << '\n';
    os << "# divergence_threshold: " << divergence_threshold << '\n';
    os << "# cluster_counts: " << m["cluster_counts"].dump() << '\n';
    os << "# wall_clock: see " << pv.cfg->str("out") << "_meta.json\n";
    return os.str();
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_meta(const Provenance& pv, const json& extra) {
    json m = full_metadata(pv);
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_text(pv.cfg->str("out") + "_meta.json", m.dump(2) + "\n");
}

void write_trace(const Provenance& pv, const CoherenceTrace& tr, const std::string& path_stem, const json& extra) {
    const std::string fmt = pv.cfg->str("format");
    if (fmt == "csv") {
        std::ostringstream os;
        os << csv_header(pv);
        for (auto it = extra.begin(); it != extra.end(); ++it) os << "# " << it.key() << ": " << it.value().dump() << '\n';
        os << "time_s,re,im,abs\n";
        for (size_t i = 0; i < tr.times.size(); ++i)
            os << num(tr.times[i]) << ',' << num(tr.values[i].real()) << ',' << num(tr.values[i].imag()) << ','
               << num(std::abs(tr.values[i])) << '\n';
        write_text(path_stem + ".csv", os.str());
    } else {
        json j = stable_metadata(pv);
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        j["divergent"] = tr.divergent;
        j["time_s"] = tr.times;
        std::vector<double> re, im;
        for (auto v : tr.values) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        j["re"] = re;
        j["im"] = im;
        write_text(path_stem + ".json", j.dump(2) + "\n");
    }
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

Eigen::Vector3d field_direction(const RunConfig& cfg) {
    const auto v = cfg.numbers("field_direction");
    require(v.size() == 3, "field_direction needs three components");
    Eigen::Vector3d d(v[0], v[1], v[2]);
    require(d.norm() > 0.0, "field_direction must be nonzero");
    return d.normalized();
}

PulseSequence sequence(const RunConfig& cfg) {
    const std::string s = cfg.str("sequence");
    if (s == "fid") return PulseSequence::fid();
    require(s == "cpmg", "sequence must be fid or cpmg");
    const long n = cfg.integer("pulses");
    require(n >= 1, "pulses must be >= 1");
    return PulseSequence::cpmg(static_cast<int>(n));
}

AveragingOptions averaging(const RunConfig& cfg, std::uint64_t seed) {
    const std::string s = cfg.str("average");
    AveragingOptions a;
    a.seed = seed;
    if (s == "all") {
        a.mode = AveragingMode::all_eigenstates;
    } else if (s == "state") {
        a.mode = AveragingMode::realisation_state;
    } else if (s.rfind("sample:", 0) == 0) {
        a.mode = AveragingMode::sampled;
        try {
            a.samples = std::stoi(s.substr(7));
        } catch (const std::exception&) {
            throw ConfigError("average: bad sample count");
        }
        require(a.samples >= 1, "average: sample count must be >= 1");
    } else {
        throw ConfigError("average must be all, state or sample:n");
    }
    return a;
}

struct DecaySetup {
    DonorParameters donor;
    int u = 0, l = 0;
    Eigen::Vector3d direction;
    CutoffPolicy policy;
    CceOptions options;
    std::vector<double> times;
    std::vector<LatticeSite> sites;
    double abundance = 0.0;
    std::uint64_t seed = 0;
    int realisations = 1;
    double convolve_w = 0.0;
    int convolve_points = 13;
};

DecaySetup decay_setup(const RunConfig& cfg) {
    DecaySetup s;
    s.donor = resolve_donor(cfg);
    std::tie(s.u, s.l) = parse_transition(cfg.str("transition"), s.donor);
    s.direction = field_direction(cfg);
    s.policy = CutoffPolicy::defaults();
    s.policy.pair_separation_max = cfg.number("pair_cutoff_angstrom");
    s.policy.growth_separation_max = s.policy.pair_separation_max;
    s.policy.box_half_side = cfg.number("box_half_side_angstrom");
    s.options.order = static_cast<int>(cfg.integer("cce_order"));
    require(s.options.order >= 1 && s.options.order <= 6, "cce_order must be in 1..6");
    s.policy.max_order = s.options.order;
    s.options.include_cce1 = cfg.flag("include_cce1");
    s.options.workers = static_cast<int>(cfg.integer("workers"));
    require(s.options.workers >= 1, "workers must be >= 1");
    try {
        s.policy.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const double t_max = cfg.number("t_max_us") * 1e-6;
    const long points = cfg.integer("time_points");
    require(t_max > 0.0 && points >= 8, "need t_max_us > 0 and time_points >= 8");
    s.times = uniform_time_grid(t_max, static_cast<int>(points));
    s.abundance = cfg.number("abundance");
    require(s.abundance >= 0.0 && s.abundance <= 1.0, "abundance must lie in [0,1]");
    s.seed = cfg.seed();
    s.realisations = static_cast<int>(cfg.integer("realisations"));
    require(s.realisations >= 1, "realisations must be >= 1");
    s.convolve_w = cfg.number("convolve_mT") * 1e-3;
    require(s.convolve_w >= 0.0, "convolve_mT must be >= 0");
    s.convolve_points = static_cast<int>(cfg.integer("convolve_points"));
    require(s.convolve_points >= 3, "convolve_points must be >= 3");
    s.sites = generate_sites_box(s.policy.box_half_side);
    sequence(cfg);
    averaging(cfg, 0);
    return s;
}

CoherenceTrace decay_at(const RunConfig& cfg, const DecaySetup& s, const BathRealisation& bath, std::uint64_t seed,
                        double field) {
    auto one = [&](double B) {
        CceProblem pr;
        pr.donor = s.donor;
        pr.field = B;
        pr.field_direction = s.direction;
        pr.u = s.u;
        pr.l = s.l;
        pr.hyperfine = HyperfineModel::for_donor(s.donor);
        pr.residual_dipolar = cfg.flag("residual_dipolar");
        pr.ising_only = cfg.flag("ising_only");
        pr.sequence = sequence(cfg);
        pr.times = s.times;
        pr.bath = bath;
        return run_cce(pr, s.policy, [&] {
            CceOptions o = s.options;
            o.averaging = averaging(cfg, derive_seed(seed, 0x5eed));
            return o;
        }());
    };
    if (s.convolve_w == 0.0) return one(field);
    std::vector<double> fields;
    std::vector<CoherenceTrace> traces;
    for (int i = 0; i < s.convolve_points; ++i) {
        const double B = field + s.convolve_w * (-3.0 + 6.0 * i / (s.convolve_points - 1));
        fields.push_back(B);
        traces.push_back(one(B));
    }
    CoherenceTrace out = convolve_field(fields, traces, field, s.convolve_w);
    out.cluster_counts = traces[s.convolve_points / 2].cluster_counts;
    return out;
}

struct DecayRun {
    std::vector<CoherenceTrace> traces;
    CoherenceTrace mean;
    bool all_divergent = true;
};

DecayRun decay_run(const RunConfig& cfg, const DecaySetup& s, double field) {
    DecayRun run;
    for (int r = 0; r < s.realisations; ++r) {
        const std::uint64_t seed = derive_seed(s.seed, static_cast<std::uint64_t>(r));
        BathRealisation bath = populate(s.sites, s.abundance, seed);
        bath.box_half_side = s.policy.box_half_side;
        run.traces.push_back(decay_at(cfg, s, bath, seed, field));
        run.all_divergent = run.all_divergent && run.traces.back().divergent;
    }
    run.mean = average_traces(run.traces, true);
    return run;
}

json fit_json(const DecayFit& f) {
    json j;
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["t2_s"] = finite_or_null(f.t2);
    j["t2_prime_s"] = finite_or_null(f.t2_prime);
    j["n"] = f.n;
    j["residual"] = f.residual;
    j["t2_err_s"] = f.t2_err;
    j["n_err"] = f.n_err;
    j["t_1e_s"] = finite_or_null(f.t_1e);
    j["decays"] = f.decays;
    j["method"] = f.method;
    return j;
}

FitOptions fit_options(const RunConfig& cfg) {
    FitOptions o;
    o.smoothing_window = static_cast<int>(cfg.integer("smoothing_window"));
    require(o.smoothing_window >= 1 && o.smoothing_window % 2 == 1, "smoothing_window must be odd and >= 1");
    return o;
}

int cmd_decay(const RunConfig& cfg, std::ostream& log) {
    Provenance pv{"decay", &cfg};
    const DecaySetup s = decay_setup(cfg);
    const double field = cfg.number("field_mT") * 1e-3;
    require(field > 0.0, "field_mT must be positive");
    const FitOptions fo = fit_options(cfg);
    const DecayRun run = decay_run(cfg, s, field);
    const std::string out = cfg.str("out");
    for (size_t r = 0; r < run.traces.size(); ++r) {
        pv.cluster_counts = run.traces[r].cluster_counts;
        json extra;
        extra["realisation"] = r;
        extra["realisation_seed"] = derive_seed(s.seed, r);
        extra["divergent"] = run.traces[r].divergent;
        write_trace(pv, run.traces[r], out + "_r" + std::to_string(r), extra);
    }
    pv.cluster_counts = run.traces.front().cluster_counts;
    json extra;
    extra["realisations"] = s.realisations;
    extra["divergent"] = run.mean.divergent;
    write_trace(pv, run.mean, out + "_mean", extra);
    const DecayFit fit = fit_decay(run.mean.times, run.mean.magnitudes(), fo);
    write_text(out + "_fit.json", fit_json(fit).dump(2) + "\n");
    json meta;
    meta["fit"] = fit_json(fit);
    meta["divergent"] = run.mean.divergent;
    write_meta(pv, meta);
    log << "decay: " << s.realisations << " realisation(s), T2 = " << fit.t2 << " s, n = " << fit.n << '\n';
    return run.all_divergent ? exit_divergent : exit_ok;
}

std::vector<double> field_grid(const RunConfig& cfg) {
    if (!cfg.has("field_min_mT") && !cfg.has("field_max_mT")) return {cfg.number("field_mT") * 1e-3};
    const double lo = cfg.number("field_min_mT") * 1e-3;
    const double hi = cfg.number("field_max_mT") * 1e-3;
    const long n = cfg.integer("field_points");
    require(lo > 0.0 && hi >= lo, "sweep needs 0 < field_min_mT <= field_max_mT");
    require(n >= 1, "field_points must be >= 1");
    require(n == 1 || hi > lo, "sweep range is empty");
    std::vector<double> g(n);
    for (long i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

int cmd_t2_sweep(const RunConfig& cfg, std::ostream& log) {
    Provenance pv{"t2-sweep", &cfg};
    const DecaySetup s = decay_setup(cfg);
    const auto grid = field_grid(cfg);
    const FitOptions fo = fit_options(cfg);
    const double cbar = cfg.number("cbar_ms") * 1e-3;
    require(cbar > 0.0, "cbar_ms must be positive");
    const PulseSequence seq = sequence(cfg);
    const bool hahn = cfg.flag("hahn_factor") && seq.kind == SequenceKind::cpmg && seq.pulses == 1;
    std::ostringstream rows;
    json table = json::array();
    bool all_div = true;
    for (double B : grid) {
        const DecayRun run = decay_run(cfg, s, B);
        all_div = all_div && run.all_divergent;
        pv.cluster_counts = run.traces.front().cluster_counts;
        const DecayFit fit = fit_decay(run.mean.times, run.mean.magnitudes(), fo);
        const double pu = polarisation(s.donor, B, s.u), pl = polarisation(s.donor, B, s.l);
        const T2FormulaResult tf = t2_formula(pu, pl, cbar, hahn);
        const bool owp = tf.at_owp || !fit.decays;
        rows << num(B * 1e3) << ',' << num(pu) << ',' << num(pl) << ',' << num(fit.t2) << ',' << num(fit.n) << ','
             << num(fit.t2_prime) << ',' << num(fit.t_1e) << ',' << num(tf.t2) << ',' << (owp ? 1 : 0) << ','
             << (run.mean.divergent ? 1 : 0) << '\n';
        json row;
        row["field_mT"] = B * 1e3;
        row["p_u"] = pu;
        row["p_l"] = pl;
        row["fit"] = fit_json(fit);
        row["t2_formula_s"] = std::isfinite(tf.t2) ? json(tf.t2) : json(nullptr);
        row["owp"] = owp;
        row["divergent"] = run.mean.divergent;
        table.push_back(row);
        log << "t2-sweep: B = " << B * 1e3 << " mT, T2 = " << fit.t2 << " s\n";
    }
    const std::string out = cfg.str("out");
    if (cfg.str("format") == "csv") {
        write_text(out + "_t2.csv", csv_header(pv) +
                                        "field_mT,p_u,p_l,t2_fit_s,n,t2_prime_s,t_1e_s,t2_formula_s,owp_flag,divergent\n" +
                                        rows.str());
    } else {
        json j = stable_metadata(pv);
        j["rows"] = table;
        write_text(out + "_t2.json", j.dump(2) + "\n");
    }
    json meta;
    meta["rows"] = table;
    write_meta(pv, meta);
    return all_div ? exit_divergent : exit_ok;
}

int cmd_endor(const RunConfig& cfg, std::ostream& log) {
    Provenance pv{"endor", &cfg};
    const DonorParameters donor = resolve_donor(cfg);
    const auto [u, l] = parse_transition(cfg.str("transition"), donor);
    const double B = cfg.number("field_mT") * 1e-3;
    require(B > 0.0, "field_mT must be positive");
    const double box = cfg.number("endor_box_angstrom");
    require(box > 0.0, "endor_box_angstrom must be positive");
    const double abundance = cfg.number("abundance");
    const double f_lo = cfg.number("endor_min_MHz") * 1e6, f_hi = cfg.number("endor_max_MHz") * 1e6;
    const long points = cfg.integer("endor_points");
    const double fwhm = cfg.number("endor_fwhm_MHz") * 1e6;
    require(f_hi > f_lo && points >= 2 && fwhm > 0.0, "bad ENDOR grid");

    const HyperfineModel hm = HyperfineModel::for_donor(donor);
    std::map<long long, std::pair<double, int>> grouped;  // rounded J (Hz) -> (J, multiplicity)
    std::vector<LatticeSite> dumped;
    std::vector<double> dumped_j;
    for (const auto& site : generate_sites_box(box)) {
        if (site.n == IVec3{0, 0, 0}) continue;
        const double j = fermi_contact(hm, donor.gamma_e, constants::gamma_si29, site.position());
        dumped.push_back(site);
        dumped_j.push_back(j);
        auto& g = grouped[std::llround(j / (2.0 * constants::pi) * 1e3)];
        g.first = j;
        g.second += 1;
    }
    std::vector<EndorCoupling> couplings;
    const double pu = polarisation(donor, B, u), pl = polarisation(donor, B, l);
    std::ostringstream lines;
    for (auto it = grouped.rbegin(); it != grouped.rend(); ++it) {
        EndorCoupling c;
        c.a_iso = it->second.first;
        c.amplitude = abundance * it->second.second;
        couplings.push_back(c);
        lines << num(c.a_iso / (2.0 * constants::pi) * 1e-6) << ',' << it->second.second << ','
              << num(endor_resonance_iso(constants::gamma_si29, B, c.a_iso, pu) * 1e-6) << ','
              << num(endor_resonance_iso(constants::gamma_si29, B, c.a_iso, pl) * 1e-6) << '\n';
    }
    std::vector<double> grid(points);
    for (long i = 0; i < points; ++i) grid[i] = f_lo + (f_hi - f_lo) * i / (points - 1);
    const auto spec = synthesize_spectrum(couplings, constants::gamma_si29, B, pu, pl, grid, fwhm);
    const std::string out = cfg.str("out");
    write_couplings_csv(dumped, dumped_j, out + "_couplings.csv");
    if (cfg.str("format") == "csv") {
        std::ostringstream os;
        os << csv_header(pv) << "# p_u: " << num(pu) << "\n# p_l: " << num(pl) << "\nfrequency_MHz,intensity\n";
        for (long i = 0; i < points; ++i) os << num(grid[i] * 1e-6) << ',' << num(spec[i]) << '\n';
        write_text(out + "_spectrum.csv", os.str());
        write_text(out + "_lines.csv", csv_header(pv) + "a_iso_MHz,multiplicity,f_upper_MHz,f_lower_MHz\n" + lines.str());
    } else {
        json j = stable_metadata(pv);
        j["p_u"] = pu;
        j["p_l"] = pl;
        std::vector<double> mhz(points);
        for (long i = 0; i < points; ++i) mhz[i] = grid[i] * 1e-6;
        j["frequency_MHz"] = mhz;
        j["intensity"] = spec;
        write_text(out + "_spectrum.json", j.dump(2) + "\n");
    }
    json meta;
    meta["p_u"] = pu;
    meta["p_l"] = pl;
    meta["distinct_couplings"] = couplings.size();
    write_meta(pv, meta);
    log << "endor: " << couplings.size() << " distinct couplings\n";
    return exit_ok;
}

int cmd_lattice_stats(const RunConfig& cfg, std::ostream& log) {
    Provenance pv{"lattice-stats", &cfg};
    const double R = cfg.number("radius_angstrom");
    const double p = cfg.number("abundance");
    require(R > 0.0, "radius_angstrom must be positive");
    require(p >= 0.0 && p <= 1.0, "abundance must lie in [0,1]");
    const ShellCensus c = shell_census(R / constants::a0_angstrom, p);
    const std::string out = cfg.str("out");
    if (cfg.str("format") == "csv") {
        std::ostringstream os;
        os << csv_header(pv) << "n_s,shells,zeta,density\n";
        for (int ns : shell_multiplicities)
            os << ns << ',' << num(c.shells.at(ns)) << ',' << num(c.zeta.at(ns)) << ',' << num(c.density.at(ns)) << '\n';
        os << "total," << "," << num(c.n_ep) << ',' << num(c.density_total) << '\n';
        write_text(out + "_census.csv", os.str());
    } else {
        json j = stable_metadata(pv);
        json rows = json::array();
        for (int ns : shell_multiplicities)
            rows.push_back({{"n_s", ns}, {"shells", c.shells.at(ns)}, {"zeta", c.zeta.at(ns)}, {"density", c.density.at(ns)}});
        j["rows"] = rows;
        j["n_ep"] = c.n_ep;
        j["density_total"] = c.density_total;
        write_text(out + "_census.json", j.dump(2) + "\n");
    }
    json meta;
    meta["N"] = c.N;
    meta["n_ep"] = c.n_ep;
    meta["density_total"] = c.density_total;
    write_meta(pv, meta);
    log << "lattice-stats: N_EP = " << c.n_ep << '\n';
    return exit_ok;
}

int cmd_owp(const RunConfig& cfg, std::ostream& log) {
    Provenance pv{"owp", &cfg};
    const DonorParameters donor = resolve_donor(cfg);
    const double lo = cfg.has("field_min_mT") ? cfg.number("field_min_mT") * 1e-3 : 1e-4;
    const double hi = cfg.has("field_max_mT") ? cfg.number("field_max_mT") * 1e-3 : 1.2;
    require(lo > 0.0 && hi > lo, "owp search needs 0 < field_min_mT < field_max_mT");
    const int d = donor.dimension();
    std::ostringstream os;
    json rows = json::array();
    int count = 0;
    for (int u = 2; u <= d; ++u)
        for (int l = 1; l < u; ++l) {
            const AdiabaticState su = state_from_index(donor, u), sl = state_from_index(donor, l);
            if (std::abs(std::abs(su.m - sl.m) - 1.0) > 1e-9) continue;
            const auto owps = find_owps(donor, u, l, lo, hi);
            const auto cts = find_clock_transitions(donor, u, l, lo, hi);
            for (double b : owps) {
                os << u << ',' << l << ",owp," << num(b * 1e3) << ',' << num(transition_frequency(donor, b, u, l)) << '\n';
                rows.push_back({{"u", u}, {"l", l}, {"kind", "owp"}, {"field_mT", b * 1e3}});
                ++count;
            }
            for (double b : cts) {
                os << u << ',' << l << ",ct," << num(b * 1e3) << ',' << num(transition_frequency(donor, b, u, l)) << '\n';
                rows.push_back({{"u", u}, {"l", l}, {"kind", "ct"}, {"field_mT", b * 1e3}});
            }
        }
    const std::string out = cfg.str("out");
    if (cfg.str("format") == "csv") {
        write_text(out + "_owp.csv", csv_header(pv) + "u,l,kind,field_mT,frequency_Hz\n" + os.str());
    } else {
        json j = stable_metadata(pv);
        j["rows"] = rows;
        write_text(out + "_owp.json", j.dump(2) + "\n");
    }
    json meta;
    meta["owp_count"] = count;
    write_meta(pv, meta);
    log << "owp: " << count << " optimal working point(s)\n";
    return exit_ok;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"decay", "t2-sweep", "endor", "lattice-stats", "owp"};
    return names;
}

DonorParameters resolve_donor(const RunConfig& cfg) {
    try {
        if (cfg.has("donor_file")) return load_donor_file(cfg.str("donor_file"));
        return donor_by_name(cfg.str("donor"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("donor: ") + e.what());
    }
}

std::pair<int, int> parse_transition(const std::string& text, const DonorParameters& p) {
    const auto comma = text.find(',');
    require(comma != std::string::npos, "transition must be 'u,l'");
    auto one = [&](std::string s) {
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        try {
            const auto colon = s.find(':');
            if (colon != std::string::npos) {
                const std::string sign = s.substr(0, colon);
                require(sign == "+" || sign == "-", "transition label sign must be + or -");
                size_t used = 0;
                const double m = std::stod(s.substr(colon + 1), &used);
                require(used == s.size() - colon - 1, "bad transition label '" + s + "'");
                return index_from_label(p, sign == "+" ? 1 : -1, m);
            }
            size_t used = 0;
            const int i = std::stoi(s, &used);
            require(used == s.size(), "bad transition index '" + s + "'");
            return i;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad transition entry '" + s + "'");
        }
    };
    const int u = one(text.substr(0, comma));
    const int l = one(text.substr(comma + 1));
    require(u >= 1 && u <= p.dimension() && l >= 1 && l <= p.dimension() && u != l,
            "transition indices must be distinct and within 1.." + std::to_string(p.dimension()));
    return {u, l};
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log) {
    const std::string fmt = cfg.str("format");
    require(fmt == "csv" || fmt == "json", "format must be csv or json");
    require(!cfg.str("out").empty(), "out must be nonempty");
    if (name == "decay") return cmd_decay(cfg, log);
    if (name == "t2-sweep") return cmd_t2_sweep(cfg, log);
    if (name == "endor") return cmd_endor(cfg, log);
    if (name == "lattice-stats") return cmd_lattice_stats(cfg, log);
    if (name == "owp") return cmd_owp(cfg, log);
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace spinbath::cli

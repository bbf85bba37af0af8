#include "cpe/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <omp.h>
#include <yaml-cpp/yaml.h>

#include "cpe/analysis.hpp"
#include "cpe/dictionary.hpp"
#include "cpe/interpolators.hpp"
#include "cpe/scoring.hpp"
#include "cpe/sensing.hpp"

namespace cpe {

const char* to_string(CaseKind kind) {
    switch (kind) {
    case CaseKind::A:
        return "A";
    case CaseKind::B:
        return "B";
    case CaseKind::C:
        return "C";
    }
    return "?";
}

CaseKind parse_case(const std::string& name) {
    if (name == "A" || name == "a") return CaseKind::A;
    if (name == "B" || name == "b") return CaseKind::B;
    if (name == "C" || name == "c") return CaseKind::C;
    throw ConfigError("case must be A, B or C, got: " + name);
}

double ExperimentConfig::resolved_min_separation() const {
    if (min_separation >= 0.0) return min_separation;
    if (problem == ModelKind::fe) return case_kind == CaseKind::A ? 5.0 : 1.0;
    return case_kind == CaseKind::A ? 1e-6 : 5.0 * grid.ts;
}

double ExperimentConfig::resolved_eta() const {
    if (eta >= 0.0) return eta;
    return case_kind == CaseKind::A ? 0.0 : 1.0;
}

NoiseKind ExperimentConfig::noise_kind() const {
    return case_kind == CaseKind::C ? NoiseKind::signal : NoiseKind::measurement;
}

SignalModel ExperimentConfig::model() const {
    return problem == ModelKind::tde ? SignalModel::tde(pulse, grid) : SignalModel::fe(grid.n);
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (K < 1) throw ConfigError("K must be >= 1");
    if (xi < 0) throw ConfigError("xi must be >= 0");
    if (redundancy < 1) throw ConfigError("redundancy must be >= 1");
    if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
    if (kappa_grid.empty() || snr_grid.empty()) throw ConfigError("kappa and snr grids must be non-empty");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(amp_min > 0.0 && amp_max >= amp_min)) throw ConfigError("amplitude range must satisfy 0 < min <= max");
    if (eta > 1.0) throw ConfigError("eta must lie in [0, 1]");
    for (double s : snr_grid) {
        if (!(s > 0.0)) throw ConfigError("snr values must be positive (use .inf for noiseless)");
    }
    for (double k : kappa_grid) {
        const double m = k * static_cast<double>(grid.n);
        if (!(k > 0.0 && k <= 1.0) || std::abs(m - std::round(m)) > 1e-9 * static_cast<double>(grid.n)) {
            throw ConfigError("each kappa must lie in (0, 1] with kappa * N integral");
        }
    }
    const SignalModel m = model();
    const double sep = resolved_min_separation();
    if (sep * static_cast<double>(K) >= m.period()) throw ConfigError("min_separation too large for K pulses");
    solver.validate();
}

namespace {

double parse_snr(const YAML::Node& node) {
    const std::string text = node.as<std::string>();
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "inf" || lower == ".inf" || lower == "+inf" || lower == "noiseless") {
        return std::numeric_limits<double>::infinity();
    }
    return node.as<double>();
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
    if (node[key]) out = node[key].as<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
    ExperimentConfig cfg;
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("invalid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config must be a YAML mapping");
    static const char* known[] = {"case", "problem", "algorithms", "kappa", "snr", "trials", "K",
                                  "min_separation", "eta", "xi", "lambda", "seed", "redundancy",
                                  "pulse", "grid", "amplitude", "music", "solver", "timing", "output"};
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("unknown config key: " + key);
        }
    }
    try {
        if (root["case"]) cfg.case_kind = parse_case(root["case"].as<std::string>());
        if (root["problem"]) {
            const std::string p = root["problem"].as<std::string>();
            if (p == "tde") cfg.problem = ModelKind::tde;
            else if (p == "fe") {
                cfg.problem = ModelKind::fe;
                cfg.grid = SamplingGrid{100, 1.0};
            } else throw ConfigError("problem must be tde or fe");
        }
        if (root["algorithms"]) {
            cfg.algorithms.clear();
            for (const auto& a : root["algorithms"]) cfg.algorithms.push_back(parse_algorithm(a.as<std::string>()));
        }
        if (root["kappa"]) cfg.kappa_grid = root["kappa"].as<std::vector<double>>();
        if (root["snr"]) {
            cfg.snr_grid.clear();
            for (const auto& s : root["snr"]) cfg.snr_grid.push_back(parse_snr(s));
        }
        read(root, "trials", cfg.trials);
        read(root, "K", cfg.K);
        read(root, "min_separation", cfg.min_separation);
        read(root, "eta", cfg.eta);
        read(root, "xi", cfg.xi);
        read(root, "lambda", cfg.lambda);
        read(root, "seed", cfg.seed);
        read(root, "redundancy", cfg.redundancy);
        read(root, "timing", cfg.timing);
        read(root, "output", cfg.output);
        if (const auto p = root["pulse"]) {
            read(p, "f0", cfg.pulse.f0);
            read(p, "delta_f", cfg.pulse.delta_f);
            read(p, "duration", cfg.pulse.duration);
        }
        if (const auto g = root["grid"]) {
            read(g, "n", cfg.grid.n);
            if (g["fs"]) cfg.grid.ts = 1.0 / g["fs"].as<double>();
        }
        if (const auto a = root["amplitude"]) {
            read(a, "min", cfg.amp_min);
            read(a, "max", cfg.amp_max);
        }
        if (const auto m = root["music"]) {
            read(m, "subarray", cfg.music.subarray);
            read(m, "refinement", cfg.music.refinement);
        }
        if (const auto s = root["solver"]) {
            read(s, "tolerance", cfg.solver.tolerance);
            read(s, "max_iterations", cfg.solver.max_iterations);
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string default_config_yaml() {
    return R"(# Compressive time-delay estimation experiment.
# case A: well-spaced pulses (min separation 1 us, band exclusion eta = 0)
# case B: overlapping pulses (min separation 5 Ts, eta = 1)
# case C: as B, with noise added before the random demodulator (noise folding)
case: A
problem: tde            # tde (chirp delays) or fe (frequency estimation, N = 100)

algorithms: [bomp, paibomp, poibomp, ccbp, paibomp_ccbp, tde_music]
kappa: [0.1, 0.2, 0.3, 0.4, 0.5]   # M / N; kappa * N must be an integer
snr: [10, 100, 1000, 10000]       # linear; .inf for noiseless
trials: 25
K: 3
# min_separation: 1.0e-6          # seconds; default depends on the case
# eta: 0                          # band exclusion level; default depends on the case
xi: 0                             # neighbours added around each greedy pick for CCBP refinement
lambda: 1.0
seed: 1
redundancy: 1                     # dictionary spacing Ts / c

pulse:
  f0: 1.0e6                       # Hz
  delta_f: 4.0e7                  # Hz
  duration: 1.0e-6                # s
grid:
  n: 500
  fs: 5.0e7                       # Hz

amplitude: {min: 1, max: 10}      # Re and Im drawn uniformly
music: {subarray: 0, refinement: 100}   # subarray 0 means floor(N / 3)
solver: {tolerance: 1.0e-6, max_iterations: 2000}

timing: true                      # false writes elapsed_s = 0 for byte-identical reruns
output: results.csv
)";
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
    std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (std::uint64_t s : stream) {
        words.push_back(static_cast<std::uint32_t>(s));
        words.push_back(static_cast<std::uint32_t>(s >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

SparseSignalParams draw_signal(const SignalModel& model, Index k, double min_separation, double amp_min,
                               double amp_max, std::mt19937_64& rng) {
    const double period = model.period();
    std::uniform_real_distribution<double> where(0.0, period);
    std::uniform_real_distribution<double> amp(amp_min, amp_max);
    SparseSignalParams params;
    params.delays.resize(k);
    params.amplitudes.resize(k);
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= kMaxAttempts) throw ConfigError("could not place pulses with the requested separation");
        bool ok = true;
        for (Index i = 0; i < k && ok; ++i) {
            params.delays(i) = where(rng);
            for (Index j = 0; j < i; ++j) {
                if (std::abs(model.circular_difference(params.delays(i), params.delays(j))) < min_separation) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) break;
    }
    for (Index i = 0; i < k; ++i) {
        const double re = amp(rng);
        const double im = amp(rng);
        params.amplitudes(i) = Complex(re, im);
    }
    return params;
}

namespace {

bool needs_arcs(const std::vector<Algorithm>& algorithms) {
    for (Algorithm a : algorithms) {
        if (a == Algorithm::poibomp || a == Algorithm::ccbp || a == Algorithm::paibomp_ccbp) return true;
    }
    return false;
}

std::uint64_t derive_seed(std::mt19937_64 rng) { return rng(); }

}  // namespace

std::vector<MetricRecord> run_case(const ExperimentConfig& cfg) {
    cfg.validate();
    const SignalModel model = cfg.model();
    const ParametricDictionary dict = build_dictionary(model, cfg.redundancy);
    const bool arcs_needed = needs_arcs(cfg.algorithms);
    const ArcBasisSet arcs = arcs_needed ? build_arc_bases(dict) : ArcBasisSet{};
    const double zeta = arcs_needed ? compute_zeta(model, cfg.redundancy).zeta : 0.0;
    const double sep = cfg.resolved_min_separation();
    const double eta = cfg.resolved_eta();

    const auto n_alg = static_cast<Index>(cfg.algorithms.size());
    const auto n_kappa = static_cast<Index>(cfg.kappa_grid.size());
    const auto n_snr = static_cast<Index>(cfg.snr_grid.size());
    const Index n_tasks = cfg.trials * n_kappa * n_snr;
    std::vector<MetricRecord> records(static_cast<std::size_t>(n_tasks * n_alg));

    const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (Index task = 0; task < n_tasks; ++task) {
        const Index trial = task / (n_kappa * n_snr);
        const Index ki = (task / n_snr) % n_kappa;
        const Index si = task % n_snr;
        const auto t64 = static_cast<std::uint64_t>(trial);
        const auto k64 = static_cast<std::uint64_t>(ki);
        const auto s64 = static_cast<std::uint64_t>(si);

        std::mt19937_64 signal_rng = stream_rng(cfg.seed, {0, t64});
        const SparseSignalParams truth = draw_signal(model, cfg.K, sep, cfg.amp_min, cfg.amp_max, signal_rng);
        const CVector f = model.synthesize(truth);
        const MeasurementOperator op =
            build_operator(model.grid.n, cfg.kappa_grid[static_cast<std::size_t>(ki)], derive_seed(stream_rng(cfg.seed, {1, t64, k64})));
        const ProjectedDictionary proj = project(op, dict, arcs_needed ? &arcs : nullptr);
        const double snr = cfg.snr_grid[static_cast<std::size_t>(si)];
        NoiseSpec noise;
        noise.kind = std::isinf(snr) ? NoiseKind::none : cfg.noise_kind();
        noise.snr = snr;
        noise.seed = derive_seed(stream_rng(cfg.seed, {2, t64, k64, s64}));
        const CVector y = measure(op, f, noise);
        const EstimationContext ctx{dict, arcs_needed ? &arcs : nullptr, op, proj};

        for (Index ai = 0; ai < n_alg; ++ai) {
            EstimatorConfig ecfg;
            ecfg.algorithm = cfg.algorithms[static_cast<std::size_t>(ai)];
            ecfg.K = cfg.K;
            ecfg.eta = eta;
            ecfg.xi = cfg.xi;
            ecfg.lambda = cfg.lambda;
            ecfg.sigma_sq = expected_noise_energy(op, f, noise);
            ecfg.zeta = zeta;
            ecfg.music = cfg.music;
            ecfg.solver = cfg.solver;

            MetricRecord rec;
            rec.case_name = to_string(cfg.case_kind);
            rec.algorithm = to_string(ecfg.algorithm);
            rec.kappa = cfg.kappa_grid[static_cast<std::size_t>(ki)];
            rec.snr = snr;
            rec.trial = trial;
            EstimationResult res;
            try {
                res = estimate(y, ctx, ecfg);
                rec.status = res.status;
            } catch (const std::exception& e) {
                res = EstimationResult{};
                rec.status = std::string("error: ") + e.what();
            }
            const MatchScore score = match_and_score(model, dict.spacing, truth, f, res);
            rec.b_mse_us2 = score.b_mse;
            rec.f_rel_err = score.f_rel_err;
            rec.elapsed_s = cfg.timing ? res.elapsed : 0.0;
            const Index slot = ((ai * n_kappa + ki) * n_snr + si) * cfg.trials + trial;
            records[static_cast<std::size_t>(slot)] = std::move(rec);
        }
    }
    return records;
}

namespace {

std::string number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    return s;
}

}  // namespace

std::string format_csv(const std::vector<MetricRecord>& records) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : records) {
        out += sanitize(r.case_name) + ',' + sanitize(r.algorithm) + ',' + number(r.kappa) + ',' + number(r.snr) +
               ',' + std::to_string(r.trial) + ',' + number(r.b_mse_us2) + ',' + number(r.f_rel_err) + ',' +
               number(r.elapsed_s) + ',' + sanitize(r.status) + '\n';
    }
    return out;
}

void emit_csv(const std::vector<MetricRecord>& records, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << format_csv(records);
    if (!os) throw std::runtime_error("failed writing output file: " + path);
}

std::vector<MetricRecord> parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw std::runtime_error("CSV header mismatch");
    std::vector<MetricRecord> records;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (fields.size() != 9) throw std::runtime_error("CSV row has the wrong field count: " + line);
        MetricRecord r;
        r.case_name = fields[0];
        r.algorithm = fields[1];
        r.kappa = std::stod(fields[2]);
        r.snr = std::stod(fields[3]);
        r.trial = std::stoll(fields[4]);
        r.b_mse_us2 = std::stod(fields[5]);
        r.f_rel_err = std::stod(fields[6]);
        r.elapsed_s = std::stod(fields[7]);
        r.status = fields[8];
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace cpe

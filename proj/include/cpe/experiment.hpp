#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cpe/barrier_solver.hpp"
#include "cpe/estimators.hpp"
#include "cpe/signal.hpp"

namespace cpe {

/// A: well-spaced pulses, B: overlapping pulses, C: B with signal (pre-measurement) noise.
enum class CaseKind { A, B, C };

const char* to_string(CaseKind kind);
CaseKind parse_case(const std::string& name);

struct ExperimentConfig {
    CaseKind case_kind = CaseKind::A;
    ModelKind problem = ModelKind::tde;
    std::vector<Algorithm> algorithms = {Algorithm::bomp, Algorithm::paibomp, Algorithm::poibomp,
                                         Algorithm::ccbp, Algorithm::paibomp_ccbp, Algorithm::tde_music};
    std::vector<double> kappa_grid = {0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> snr_grid = {10.0, 100.0, 1000.0, 10000.0};
    Index trials = 25;
    Index K = 3;
    double min_separation = -1.0;  ///< < 0 selects the case default
    double eta = -1.0;             ///< < 0 selects the case default
    Index xi = 0;
    double lambda = 1.0;
    std::uint64_t seed = 1;
    int redundancy = 1;
    PulseSpec pulse;
    SamplingGrid grid;
    double amp_min = 1.0;
    double amp_max = 10.0;
    MusicConfig music;
    SolverConfig solver;
    bool timing = true;  ///< false writes elapsed_s = 0 so reruns are byte-identical
    int jobs = 0;        ///< 0 uses the OpenMP default
    std::string output = "results.csv";

    double resolved_min_separation() const;
    double resolved_eta() const;
    NoiseKind noise_kind() const;
    SignalModel model() const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
/// Commented YAML reproducing the paper parameters at desk scale.
std::string default_config_yaml();

struct MetricRecord {
    std::string case_name;
    std::string algorithm;
    double kappa = 1.0;
    double snr = 0.0;
    Index trial = 0;
    double b_mse_us2 = 0.0;
    double f_rel_err = 0.0;
    double elapsed_s = 0.0;
    std::string status;

    bool operator==(const MetricRecord&) const = default;
};

/// Independent generator for a (seed, stream...) tuple.
std::mt19937_64 stream_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

/// K delays uniform on the circular parameter interval with pairwise circular separation
/// >= min_separation (rejection sampling), amplitudes with Re, Im ~ U[amp_min, amp_max].
SparseSignalParams draw_signal(const SignalModel& model, Index k, double min_separation, double amp_min,
                               double amp_max, std::mt19937_64& rng);

std::vector<MetricRecord> run_case(const ExperimentConfig& cfg);

inline const char* kCsvHeader = "case,algorithm,kappa,snr,trial,b_mse_us2,f_rel_err,elapsed_s,status";

std::string format_csv(const std::vector<MetricRecord>& records);
void emit_csv(const std::vector<MetricRecord>& records, const std::string& path);
std::vector<MetricRecord> parse_csv(const std::string& text);

}  // namespace cpe

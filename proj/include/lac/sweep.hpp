#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lac/em.hpp"
#include "lac/synth.hpp"

namespace lac {

enum class Method { lac, borda, bradley_terry, condorcet };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

/// One-parameter grid over fresh synthetic datasets.
struct SweepSpec {
    std::string parameter; // one of R, I, eta, J, e
    std::vector<double> values;
    SynthConfig base;
    int trials = 5;
    std::vector<Method> methods{Method::lac, Method::borda, Method::bradley_terry,
                                Method::condorcet};
    EmConfig em;

    void check() const; // throws std::invalid_argument
};

/// Applies one grid value to a copy of the base config.
SynthConfig apply_parameter(const SynthConfig& base, const std::string& parameter, double value);

struct SweepCell {
    Method method = Method::lac;
    double value = 0.0;
    int trial = 0;
    bool ok = false;           // false: method failed on this cell, accuracy missing
    double accuracy = 0.0;
    double ability_error = -1.0; // lac only; < 0 when not applicable
    std::string error;
};

struct SweepSummary {
    Method method = Method::lac;
    double value = 0.0;
    int completed_trials = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample (n-1); zero for a single trial
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;

    std::vector<SweepSummary> summarize() const;
};

/// Runs every (value, trial, method) cell; trial t draws its dataset with
/// seed base.seed + t so each cell is individually reproducible, and all
/// methods within a cell see the same dataset. Cells run concurrently; a
/// failing cell is recorded and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec);

/// CSV columns: method,param,value,trial,accuracy (blank accuracy when the
/// cell failed).
void write_raw_csv(const SweepResult& result, std::ostream& out);
/// CSV columns: method,param,value,mean,std
void write_summary_csv(const SweepResult& result, std::ostream& out);
/// CSV columns: param,value,trial,error: ability estimation error of the
/// lac cells (empty when lac was not run).
void write_ability_error_csv(const SweepResult& result, std::ostream& out);

} // namespace lac

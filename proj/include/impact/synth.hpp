#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "impact/itch.hpp"

namespace impact {

/*
 * Deterministic synthetic order-flow generator with planted cross-impacts.
 *
 * Every stock runs a one-order-per-side book on an integer price grid:
 * background quote events cancel and re-post both best orders around a
 * random-walking midpoint, and trade episodes fully execute the resting
 * order on one side and immediately replenish it at the same price (trades
 * are price-neutral on their own).
 *
 * A planted impact (source j -> target i) re-quotes stock i one millisecond
 * after a trade episode of stock j, shifting i's log-midpoint by
 * delta * s + eta, where s equals the trade sign with probability
 * (1 + sign_correlation)/2 and its negation otherwise, and eta is zero-mean
 * Gaussian observation noise. Because the re-quote is the first quote of i
 * after the trade, the measured event-time response averages to
 * probability * delta * sign_correlation by construction (grid rounding
 * contributes < 1e-6 relative error at the default price level). When the
 * impact does not fire (probability < 1), the re-quote still happens with
 * the noise term alone, keeping episode windows separated. Self-impacts
 * (i == j) fire per trade rather than per episode so that every trade sees
 * its own shift.
 *
 * Trade episodes are Poisson. A "cluster" episode emits two same-sign
 * trades a few milliseconds apart with the planted re-quote following the
 * second trade; both trades then share their surrounding quote pair and are
 * classified "multiple" downstream. With cluster probability q a fraction
 * 2q/(1+q) of trades is multiple, so the generator draws clusters with
 * q = f/(2-f) to hit the configured multiple fraction f.
 */

struct PlantedImpact {
    int source = 0; // j: the stock whose trades move the target
    int target = 0; // i: the stock whose midpoint shifts (self allowed)
    double delta = 0.0;            // log-midpoint shift per fired event
    double probability = 1.0;      // chance a trade/episode fires the shift
    double sign_correlation = 1.0; // in [-1, 1]: E[shift direction * sign]

    // Population mean of the measured response for this pair.
    double expected_response() const { return probability * delta * sign_correlation; }
};

struct SynthConfig {
    int n_stocks = 0;
    std::int64_t session_ms = 0;

    // Per-stock intensities (events per minute). A single entry broadcasts
    // to every stock; otherwise the size must equal n_stocks.
    std::vector<double> trades_per_minute{4.0};
    std::vector<double> quotes_per_minute{30.0};

    // Target fraction of trades classified "multiple" downstream.
    double multiple_fraction = 0.35;

    // Standard deviation of the zero-mean log-midpoint noise added to every
    // planted re-quote. Keeps per-observation spread honest so that
    // mean +- few * SE covers the planted value despite grid rounding.
    double response_noise = 1e-4;

    double base_price_dollars = 100.0;
    std::vector<PlantedImpact> impacts;
    std::uint64_t seed = 1;

    // When true, a fraction of episodes emits two trades in the same
    // millisecond (ambiguous at tape resolution) to exercise downstream
    // millisecond de-duplication. Collision episodes fire no impacts.
    bool same_ms_collisions = false;
    double collision_rate = 0.05;
};

// Ground truth recorded alongside the generated stream.
struct SynthStockTruth {
    std::string symbol;
    std::int64_t episodes = 0;
    std::int64_t clusters = 0;
    std::int64_t trades = 0;          // individual trade prints, collisions included
    std::int64_t collision_pairs = 0; // same-millisecond pairs injected
    std::int64_t quote_events = 0;    // background re-quotes
};

struct SynthImpactTruth {
    PlantedImpact impact;
    std::int64_t fired = 0; // shifts actually planted (excludes noise-only)
};

struct SynthResult {
    std::vector<ItchMessage> messages; // global stream, time-ordered
    std::vector<SynthStockTruth> stocks;
    std::vector<SynthImpactTruth> impacts;
    double cluster_probability = 0.0; // q = f/(2-f)
};

// Stock symbols used by the generator: "S00", "S01", ...
std::vector<std::string> synth_symbols(int n_stocks);

// Generates the full message stream. Identical configs (same seed) produce
// byte-identical serialized streams. Infeasible configs (non-positive
// intensities, intensities too high for the millisecond grid, out-of-range
// probabilities, planted indices outside the universe, prices driven
// non-positive) throw ValidationError.
SynthResult generate_synthetic_flow(const SynthConfig& config);

// Deterministic JSON document with the config echo and the realized ground
// truth (per-stock counts, per-impact fired counts and expected responses).
std::string synth_manifest_json(const SynthConfig& config, const SynthResult& result);

// Writes messages.csv (with header) and synth_manifest.json into dir.
void write_synth_outputs(const std::filesystem::path& dir, const SynthConfig& config,
                         const SynthResult& result);

} // namespace impact

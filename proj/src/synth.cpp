#include "impact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

#include "impact/errors.hpp"
#include "impact/io.hpp"

namespace impact {

namespace {

constexpr std::int64_t order_volume = 100;
constexpr std::int64_t half_spread_units = 100; // $0.02 spread on the 1e-4 grid
constexpr std::int64_t walk_tick_units = 100;   // $0.01 background midpoint step

// Minimum mean event gaps (ms) keeping episodes and re-quotes resolvable on
// the millisecond grid; denser schedules are rejected as infeasible.
constexpr double min_mean_episode_gap_ms = 12.0;
constexpr double min_mean_quote_gap_ms = 4.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent deterministic stream per (purpose tag, index).
std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(tag ^ splitmix64(index))));
}

struct StockEvent {
    std::int64_t t_ms = 0;
    int seq = 0; // per-stock append order; breaks same-millisecond ties
    bool is_trade = false;
    int walk_steps = 0;     // re-quote: background walk steps
    double log_shift = 0.0; // re-quote: planted shift plus noise
    int sign = 0;           // trade: +1 executes the ask, -1 the bid
    bool collide = false;   // trade: emit a second print in the same ms
};

struct Episode {
    std::int64_t t_first = 0;
    std::int64_t t_last = 0;
    int stock = 0;
    bool cluster = false;
    bool collide = false;
    int sign = 0;
};

std::vector<double> expand_per_stock(const std::vector<double>& values, int n, const char* what) {
    if (values.size() != 1 && values.size() != static_cast<std::size_t>(n))
        throw ValidationError(std::string("synth: ") + what + " needs 1 or n_stocks entries");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double v = values.size() == 1 ? values[0] : values[static_cast<std::size_t>(i)];
        if (!(std::isfinite(v) && v > 0.0))
            throw ValidationError(std::string("synth: ") + what + " must be positive");
        out[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

void validate_config(const SynthConfig& cfg) {
    if (cfg.n_stocks < 1) throw ValidationError("synth: need at least one stock");
    if (cfg.session_ms < 1) throw ValidationError("synth: session length must be positive");
    if (!(cfg.multiple_fraction >= 0.0 && cfg.multiple_fraction <= 1.0))
        throw ValidationError("synth: multiple_fraction must be in [0, 1]");
    if (!(std::isfinite(cfg.response_noise) && cfg.response_noise >= 0.0))
        throw ValidationError("synth: response_noise must be non-negative");
    if (!(std::isfinite(cfg.base_price_dollars) && cfg.base_price_dollars > 0.0))
        throw ValidationError("synth: base price must be positive");
    if (!(cfg.collision_rate >= 0.0 && cfg.collision_rate <= 1.0))
        throw ValidationError("synth: collision_rate must be in [0, 1]");
    for (const auto& im : cfg.impacts) {
        if (im.source < 0 || im.source >= cfg.n_stocks || im.target < 0 ||
            im.target >= cfg.n_stocks)
            throw ValidationError("synth: planted impact references an unknown stock");
        if (!std::isfinite(im.delta)) throw ValidationError("synth: planted delta must be finite");
        if (!(im.probability >= 0.0 && im.probability <= 1.0))
            throw ValidationError("synth: planted probability must be in [0, 1]");
        if (!(im.sign_correlation >= -1.0 && im.sign_correlation <= 1.0))
            throw ValidationError("synth: sign correlation must be in [-1, 1]");
    }
}

std::int64_t ceil_ms(double x) { return static_cast<std::int64_t>(std::ceil(x)); }

} // namespace

std::vector<std::string> synth_symbols(int n_stocks) {
    int width = 2;
    for (int v = n_stocks - 1; v >= 100; v /= 10) ++width;
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(std::max(0, n_stocks)));
    for (int i = 0; i < n_stocks; ++i) {
        std::string digits = std::to_string(i);
        out.push_back("S" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') +
                      digits);
    }
    return out;
}

SynthResult generate_synthetic_flow(const SynthConfig& cfg) {
    validate_config(cfg);
    const int n = cfg.n_stocks;
    const auto tpm = expand_per_stock(cfg.trades_per_minute, n, "trades_per_minute");
    const auto qpm = expand_per_stock(cfg.quotes_per_minute, n, "quotes_per_minute");
    const auto symbols = synth_symbols(n);

    const double f = cfg.multiple_fraction;
    const double q = f / (2.0 - f); // episode cluster probability

    const std::int64_t base_half_mid =
        std::llround(cfg.base_price_dollars * static_cast<double>(price4_per_dollar));
    if (base_half_mid - half_spread_units < 1)
        throw ValidationError("synth: base price too small for the spread");

    SynthResult result;
    result.cluster_probability = q;
    result.stocks.resize(static_cast<std::size_t>(n));
    result.impacts.reserve(cfg.impacts.size());
    for (const auto& im : cfg.impacts) result.impacts.push_back({im, 0});

    std::vector<std::vector<StockEvent>> events(static_cast<std::size_t>(n));
    const auto append_event = [&events](int stock, StockEvent ev) {
        auto& list = events[static_cast<std::size_t>(stock)];
        ev.seq = static_cast<int>(list.size());
        list.push_back(ev);
    };

    // --- pass 1: per-stock Poisson schedules ---------------------------------
    std::vector<Episode> episodes;
    for (int j = 0; j < n; ++j) {
        auto& truth = result.stocks[static_cast<std::size_t>(j)];
        truth.symbol = symbols[static_cast<std::size_t>(j)];

        const double episode_rate = tpm[static_cast<std::size_t>(j)] / ((1.0 + q) * 60'000.0);
        if (1.0 / episode_rate < min_mean_episode_gap_ms)
            throw ValidationError("synth: trade intensity too high for the millisecond grid");
        auto rng = seeded_rng(cfg.seed, 0x7261646573ULL, static_cast<std::uint64_t>(j));
        std::exponential_distribution<double> gap(episode_rate);
        std::bernoulli_distribution cluster_coin(q);
        std::bernoulli_distribution collide_coin(cfg.collision_rate);
        std::bernoulli_distribution buy_coin(0.5);
        std::uniform_int_distribution<std::int64_t> cluster_gap(2, 4);

        std::int64_t t = 1 + ceil_ms(gap(rng));
        while (true) {
            Episode ep;
            ep.stock = j;
            ep.cluster = cluster_coin(rng);
            ep.collide = cfg.same_ms_collisions && collide_coin(rng);
            if (ep.collide) ep.cluster = false;
            ep.sign = buy_coin(rng) ? 1 : -1;
            ep.t_first = t;
            ep.t_last = ep.cluster ? t + cluster_gap(rng) : t;
            if (ep.t_last + 1 > cfg.session_ms) break;

            append_event(j, {.t_ms = ep.t_first,
                             .is_trade = true,
                             .sign = ep.sign,
                             .collide = ep.collide});
            if (ep.cluster) append_event(j, {.t_ms = ep.t_last, .is_trade = true, .sign = ep.sign});

            ++truth.episodes;
            truth.clusters += ep.cluster ? 1 : 0;
            truth.collision_pairs += ep.collide ? 1 : 0;
            truth.trades += (ep.cluster || ep.collide) ? 2 : 1;
            episodes.push_back(ep);

            t = ep.t_last + 6 + ceil_ms(gap(rng));
        }

        const double quote_rate = qpm[static_cast<std::size_t>(j)] / 60'000.0;
        if (1.0 / quote_rate < min_mean_quote_gap_ms)
            throw ValidationError("synth: quote intensity too high for the millisecond grid");
        auto qrng = seeded_rng(cfg.seed, 0x71756F746573ULL, static_cast<std::uint64_t>(j));
        std::exponential_distribution<double> qgap(quote_rate);
        std::bernoulli_distribution up_coin(0.5);
        std::int64_t tq = 1 + ceil_ms(qgap(qrng));
        while (tq <= cfg.session_ms) {
            append_event(j, {.t_ms = tq, .walk_steps = up_coin(qrng) ? 1 : -1});
            ++truth.quote_events;
            tq += 2 + ceil_ms(qgap(qrng));
        }
    }

    // --- pass 2: planted impact re-quotes, resolved on a global clock --------
    std::vector<std::vector<std::size_t>> impacts_by_source(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < cfg.impacts.size(); ++k)
        impacts_by_source[static_cast<std::size_t>(cfg.impacts[k].source)].push_back(k);

    std::stable_sort(episodes.begin(), episodes.end(), [](const Episode& a, const Episode& b) {
        return a.t_first != b.t_first ? a.t_first < b.t_first : a.stock < b.stock;
    });

    auto irng = seeded_rng(cfg.seed, 0x696D70616374ULL, 0);
    std::normal_distribution<double> noise(0.0, cfg.response_noise > 0.0 ? cfg.response_noise : 1.0);
    const auto draw_shift = [&](const PlantedImpact& im, int trade_sign, std::int64_t& fired) {
        const bool fire = std::bernoulli_distribution(im.probability)(irng);
        const int s =
            std::bernoulli_distribution((1.0 + im.sign_correlation) / 2.0)(irng) ? trade_sign
                                                                                 : -trade_sign;
        const double eta = cfg.response_noise > 0.0 ? noise(irng) : 0.0;
        if (fire) ++fired;
        return (fire ? im.delta * static_cast<double>(s) : 0.0) + eta;
    };

    for (const auto& ep : episodes) {
        if (ep.collide) continue;
        for (std::size_t k : impacts_by_source[static_cast<std::size_t>(ep.stock)]) {
            const auto& im = cfg.impacts[k];
            auto& fired = result.impacts[k].fired;
            if (im.source == im.target) {
                // Self-impacts fire per trade so each trade's own window
                // (bounded by the trade's replenish quotes) sees a shift.
                append_event(im.target, {.t_ms = ep.t_first + 1,
                                         .log_shift = draw_shift(im, ep.sign, fired)});
                if (ep.cluster)
                    append_event(im.target, {.t_ms = ep.t_last + 1,
                                             .log_shift = draw_shift(im, ep.sign, fired)});
            } else {
                // Cross-impacts fire once per episode after the last trade;
                // cluster trades then share the shifted following quote.
                append_event(im.target,
                             {.t_ms = ep.t_last + 1, .log_shift = draw_shift(im, ep.sign, fired)});
            }
        }
    }

    // --- pass 3: realize each stock's book ----------------------------------
    struct TaggedMessage {
        int stock;
        int seq;
        ItchMessage msg;
    };
    std::vector<TaggedMessage> tagged;

    for (int i = 0; i < n; ++i) {
        auto& list = events[static_cast<std::size_t>(i)];
        std::sort(list.begin(), list.end(), [](const StockEvent& a, const StockEvent& b) {
            return a.t_ms != b.t_ms ? a.t_ms < b.t_ms : a.seq < b.seq;
        });

        std::uint64_t next_id = static_cast<std::uint64_t>(i + 1) * 10'000'000'000ULL;
        int emit_seq = 0;
        const auto emit = [&](std::int64_t t, MsgType type, std::uint64_t id, Price4 price,
                              std::int64_t volume) {
            ItchMessage m;
            m.t_ms = t;
            m.type = type;
            m.order_id = id;
            m.price = price;
            m.volume = volume;
            m.stock = symbols[static_cast<std::size_t>(i)];
            if (type == MsgType::submit_buy) m.side = Side::buy;
            if (type == MsgType::submit_sell) m.side = Side::sell;
            tagged.push_back({i, emit_seq++, std::move(m)});
        };

        std::int64_t h = base_half_mid; // half of mid_x2, in 1e-4 dollar units
        std::uint64_t bid_id = next_id++;
        std::uint64_t ask_id = next_id++;
        emit(0, MsgType::submit_buy, bid_id, static_cast<Price4>(h - half_spread_units),
             order_volume);
        emit(0, MsgType::submit_sell, ask_id, static_cast<Price4>(h + half_spread_units),
             order_volume);

        for (const auto& ev : list) {
            if (ev.is_trade) {
                const int prints = ev.collide ? 2 : 1;
                for (int rep = 0; rep < prints; ++rep) {
                    if (ev.sign > 0) {
                        emit(ev.t_ms, MsgType::execute_full, ask_id, 0, 0);
                        ask_id = next_id++;
                        emit(ev.t_ms, MsgType::submit_sell, ask_id,
                             static_cast<Price4>(h + half_spread_units), order_volume);
                    } else {
                        emit(ev.t_ms, MsgType::execute_full, bid_id, 0, 0);
                        bid_id = next_id++;
                        emit(ev.t_ms, MsgType::submit_buy, bid_id,
                             static_cast<Price4>(h - half_spread_units), order_volume);
                    }
                }
            } else {
                std::int64_t h_new = h + ev.walk_steps * walk_tick_units;
                if (ev.log_shift != 0.0)
                    h_new = std::llround(static_cast<double>(h_new) * std::exp(ev.log_shift));
                if (h_new - half_spread_units < 1)
                    throw ValidationError("synth: midpoint walked below the price grid");
                emit(ev.t_ms, MsgType::cancel_full, bid_id, 0, 0);
                emit(ev.t_ms, MsgType::cancel_full, ask_id, 0, 0);
                bid_id = next_id++;
                emit(ev.t_ms, MsgType::submit_buy, bid_id,
                     static_cast<Price4>(h_new - half_spread_units), order_volume);
                ask_id = next_id++;
                emit(ev.t_ms, MsgType::submit_sell, ask_id,
                     static_cast<Price4>(h_new + half_spread_units), order_volume);
                h = h_new;
            }
        }
    }

    // --- pass 4: deterministic global merge ----------------------------------
    std::sort(tagged.begin(), tagged.end(), [](const TaggedMessage& a, const TaggedMessage& b) {
        if (a.msg.t_ms != b.msg.t_ms) return a.msg.t_ms < b.msg.t_ms;
        if (a.stock != b.stock) return a.stock < b.stock;
        return a.seq < b.seq;
    });
    result.messages.reserve(tagged.size());
    for (auto& tm : tagged) result.messages.push_back(std::move(tm.msg));
    return result;
}

std::string synth_manifest_json(const SynthConfig& cfg, const SynthResult& result) {
    nlohmann::ordered_json doc;
    doc["format"] = "synth-manifest-v1";
    doc["seed"] = cfg.seed;

    nlohmann::ordered_json jcfg;
    jcfg["n_stocks"] = cfg.n_stocks;
    jcfg["session_ms"] = cfg.session_ms;
    jcfg["trades_per_minute"] = cfg.trades_per_minute;
    jcfg["quotes_per_minute"] = cfg.quotes_per_minute;
    jcfg["multiple_fraction"] = cfg.multiple_fraction;
    jcfg["response_noise"] = cfg.response_noise;
    jcfg["base_price_dollars"] = cfg.base_price_dollars;
    jcfg["same_ms_collisions"] = cfg.same_ms_collisions;
    jcfg["collision_rate"] = cfg.collision_rate;
    doc["config"] = std::move(jcfg);

    doc["cluster_probability"] = result.cluster_probability;
    doc["expected_multiple_fraction"] =
        2.0 * result.cluster_probability / (1.0 + result.cluster_probability);

    nlohmann::ordered_json jstocks = nlohmann::ordered_json::array();
    for (const auto& s : result.stocks) {
        nlohmann::ordered_json js;
        js["symbol"] = s.symbol;
        js["episodes"] = s.episodes;
        js["clusters"] = s.clusters;
        js["trades"] = s.trades;
        js["collision_pairs"] = s.collision_pairs;
        js["quote_events"] = s.quote_events;
        jstocks.push_back(std::move(js));
    }
    doc["stocks"] = std::move(jstocks);

    nlohmann::ordered_json jimpacts = nlohmann::ordered_json::array();
    for (const auto& pt : result.impacts) {
        nlohmann::ordered_json ji;
        ji["source"] = pt.impact.source;
        ji["target"] = pt.impact.target;
        ji["delta"] = pt.impact.delta;
        ji["probability"] = pt.impact.probability;
        ji["sign_correlation"] = pt.impact.sign_correlation;
        ji["expected_response"] = pt.impact.expected_response();
        ji["fired"] = pt.fired;
        jimpacts.push_back(std::move(ji));
    }
    doc["impacts"] = std::move(jimpacts);

    return doc.dump(2) + "\n";
}

void write_synth_outputs(const std::filesystem::path& dir, const SynthConfig& cfg,
                         const SynthResult& result) {
    std::filesystem::create_directories(dir);
    write_messages_csv(dir / "messages.csv", result.messages, /*with_header=*/true);
    write_text_file(dir / "synth_manifest.json", synth_manifest_json(cfg, result));
}

} // namespace impact

#include "impact/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace impact {

std::vector<MidPoint> midpoint_series(const std::vector<QuoteRecord>& quotes) {
    std::vector<MidPoint> mids;
    mids.reserve(quotes.size());
    for (const QuoteRecord& q : quotes) {
        if (q.two_sided()) {
            mids.push_back(MidPoint{q.t_ms, q.mid_x2()});
        }
    }
    return mids;
}

QuotePair pair_trade(const std::vector<MidPoint>& mids, std::int64_t t_trade) {
    QuotePair pair;
    // prev: last entry with t <= t_trade - 1
    auto prev_it = std::upper_bound(mids.begin(), mids.end(), t_trade - 1,
                                    [](std::int64_t t, const MidPoint& m) { return t < m.t_ms; });
    if (prev_it != mids.begin()) {
        pair.prev = std::distance(mids.begin(), prev_it) - 1;
    }
    // foll: first entry with t >= t_trade + 1
    auto foll_it = std::lower_bound(mids.begin(), mids.end(), t_trade + 1,
                                    [](const MidPoint& m, std::int64_t t) { return m.t_ms < t; });
    if (foll_it != mids.end()) {
        pair.foll = std::distance(mids.begin(), foll_it);
    }
    return pair;
}

std::vector<PairedObservation> observations_for_pair(const std::vector<MidPoint>& mids_i,
                                                     const std::vector<TradeEvent>& trades_j,
                                                     int impacted, int impacting) {
    struct Paired {
        std::size_t trade_index;
        QuotePair quotes;
    };
    std::vector<Paired> paired;
    paired.reserve(trades_j.size());
    std::map<std::pair<std::ptrdiff_t, std::ptrdiff_t>, int> pair_counts;

    for (std::size_t k = 0; k < trades_j.size(); ++k) {
        const QuotePair q = pair_trade(mids_i, trades_j[k].t_ms);
        if (!q.valid()) {
            continue;
        }
        paired.push_back(Paired{k, q});
        pair_counts[{q.prev, q.foll}] += 1;
    }

    std::vector<PairedObservation> observations;
    observations.reserve(paired.size());
    for (const Paired& p : paired) {
        const TradeEvent& trade = trades_j[p.trade_index];
        PairedObservation obs;
        obs.impacted = impacted;
        obs.impacting = impacting;
        obs.t_ms = trade.t_ms;
        obs.sign = trade.sign;
        const auto prev = static_cast<std::size_t>(p.quotes.prev);
        const auto foll = static_cast<std::size_t>(p.quotes.foll);
        obs.log_return = std::log(static_cast<double>(mids_i[foll].mid_x2) /
                                  static_cast<double>(mids_i[prev].mid_x2));
        obs.trade_case = pair_counts[{p.quotes.prev, p.quotes.foll}] >= 2 ? TradeCase::multiple
                                                                          : TradeCase::single;
        observations.push_back(obs);
    }
    return observations;
}

} // namespace impact

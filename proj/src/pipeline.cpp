#include "impact/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/version.hpp>

#include "json.hpp"

#include "impact/asymmetry.hpp"
#include "impact/entropy.hpp"
#include "impact/errors.hpp"
#include "impact/io.hpp"
#include "impact/network.hpp"
#include "impact/pairing.hpp"
#include "impact/reconstruct.hpp"
#include "impact/spectra.hpp"
#include "impact/stable.hpp"

namespace impact {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// ---- seeds and hashing ------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex_u64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(18, '0');
    s[0] = '0';
    s[1] = 'x';
    for (int i = 17; i >= 2; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

// ---- config JSON helpers ----------------------------------------------------

void check_keys(const ordered_json& j, const std::string& ctx,
                std::initializer_list<std::string_view> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (std::string_view a : allowed) {
            if (it.key() == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError("config: unknown key \"" + it.key() + "\" in " + ctx);
        }
    }
}

double get_num(const ordered_json& j, const std::string& ctx) {
    if (!j.is_number()) throw ParseError("config: " + ctx + " must be a number");
    return j.get<double>();
}

std::int64_t get_int(const ordered_json& j, const std::string& ctx) {
    if (!j.is_number_integer()) throw ParseError("config: " + ctx + " must be an integer");
    return j.get<std::int64_t>();
}

std::uint64_t get_uint(const ordered_json& j, const std::string& ctx) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
    throw ParseError("config: " + ctx + " must be a non-negative integer");
}

bool get_bool(const ordered_json& j, const std::string& ctx) {
    if (!j.is_boolean()) throw ParseError("config: " + ctx + " must be a boolean");
    return j.get<bool>();
}

std::string get_str(const ordered_json& j, const std::string& ctx) {
    if (!j.is_string()) throw ParseError("config: " + ctx + " must be a string");
    return j.get<std::string>();
}

// Per-stock rate: a single number broadcasts, an array lists per-stock values.
std::vector<double> get_rates(const ordered_json& j, const std::string& ctx) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        std::vector<double> rates;
        rates.reserve(j.size());
        for (std::size_t k = 0; k < j.size(); ++k) {
            rates.push_back(get_num(j[k], ctx + "[" + std::to_string(k) + "]"));
        }
        return rates;
    }
    throw ParseError("config: " + ctx + " must be a number or an array of numbers");
}

void validate_config(const PipelineConfig& cfg) {
    if (!cfg.use_synth && cfg.messages_csv.empty()) {
        throw ValidationError("config: input.messages_csv must not be empty");
    }
    if (cfg.session_start_ms >= 0 && cfg.session_end_ms >= 0 &&
        cfg.session_end_ms < cfg.session_start_ms) {
        throw ValidationError("config: session end_ms precedes start_ms");
    }
    if (cfg.cases.empty()) throw ValidationError("config: cases must not be empty");
    for (std::size_t a = 0; a < cfg.cases.size(); ++a) {
        for (std::size_t b = a + 1; b < cfg.cases.size(); ++b) {
            if (cfg.cases[a] == cfg.cases[b]) {
                throw ValidationError("config: duplicate case \"" + case_name(cfg.cases[a]) + "\"");
            }
        }
    }
    if (cfg.k_bins < 2) throw ValidationError("config: k_bins must be >= 2");
    if (cfg.q_groups < 1) throw ValidationError("config: q_groups must be >= 1");
    if (cfg.random_L < 0) throw ValidationError("config: random_L must be >= 0");
    if (!(cfg.network_lo >= 0.0) || !(cfg.network_hi > cfg.network_lo)) {
        throw ValidationError("config: network thresholds need 0 <= lo < hi");
    }
    if (cfg.out_dir.empty()) throw ValidationError("config: out_dir must not be empty");
}

// ---- artifact access helpers ------------------------------------------------

fs::path need_file(const fs::path& path, const std::string& stage) {
    if (!fs::exists(path)) {
        throw ValidationError(stage + ": required artifact missing: " + path.string() +
                              " (run the producing stage first)");
    }
    return path;
}

std::vector<std::string> meta_symbols(const std::vector<StockMeta>& meta) {
    std::vector<std::string> symbols;
    symbols.reserve(meta.size());
    for (const StockMeta& m : meta) symbols.push_back(m.symbol);
    return symbols;
}

std::vector<double> offdiag_present(const Eigen::MatrixXd& m) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && !std::isnan(m(i, j))) values.push_back(m(i, j));
        }
    }
    return values;
}

std::vector<double> diag_present(const Eigen::MatrixXd& m) {
    std::vector<double> values;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (!std::isnan(m(i, i))) values.push_back(m(i, i));
    }
    return values;
}

LabeledMatrix load_responses(const fs::path& out, ResponseCase c, const std::string& stage) {
    return read_matrix_csv(need_file(out / ("responses_" + case_name(c) + ".csv"), stage));
}

ordered_json parse_json_artifact(const fs::path& path, const std::string& stage) {
    try {
        return ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(stage + ": malformed JSON artifact " + path.string() + ": " + e.what());
    }
}

// ---- fit-stage helpers ------------------------------------------------------

ordered_json fit_entry_json(const StableFit& fit, const DistStats& stats) {
    ordered_json j;
    j["alpha"] = fit.params.alpha;
    j["beta"] = fit.params.beta;
    j["gamma"] = fit.params.gamma;
    j["mu0"] = fit.params.mu0;
    j["loglik"] = fit.loglik;
    j["n"] = fit.n;
    j["boundary_flags"] = fit.boundary_flags;
    ordered_json s;
    s["mode"] = stats.mode;
    s["mean"] = stats.mean;
    s["median"] = stats.median;
    s["std_dev"] = stats.std_dev;
    s["skewness"] = stats.skewness;
    j["stats"] = s;
    return j;
}

void write_histogram_csv(const fs::path& path, const std::vector<double>& values,
                         const StableParams& params, int k_bins) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi - lo) / static_cast<double>(k_bins);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k_bins), 0);
    for (double v : values) {
        auto b = static_cast<std::int64_t>((v - lo) / width);
        b = std::clamp<std::int64_t>(b, 0, k_bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    std::string text = "left_edge,right_edge,count,density,fit_density\n";
    const double n_total = static_cast<double>(values.size());
    for (int b = 0; b < k_bins; ++b) {
        const double left = lo + width * b;
        const double right = (b == k_bins - 1) ? hi : lo + width * (b + 1);
        const double density = static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                               (n_total * width);
        const double fit_density = stable_pdf(0.5 * (left + right), params);
        text += format_double(left) + "," + format_double(right) + "," +
                std::to_string(counts[static_cast<std::size_t>(b)]) + "," +
                format_double(density) + "," + format_double(fit_density) + "\n";
    }
    write_text_file(path, text);
}

// Fits one pooled sample; returns the JSON entry or a {"skipped": reason}
// placeholder (samples below the 100-observation floor, or constant samples,
// carry no usable law).
ordered_json fit_or_skip(const fs::path& out, const std::string& label,
                         const std::string& histogram_name, const std::vector<double>& pooled,
                         int k_bins, StageInfo& info) {
    if (pooled.size() < 100) {
        const std::string reason =
            "only " + std::to_string(pooled.size()) + " responses present (< 100)";
        info.warnings.push_back("fit: " + label + ": " + reason + "; no fit");
        return ordered_json{{"skipped", reason}};
    }
    const auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
    if (!(*hi_it > *lo_it)) {
        const std::string reason = "constant sample";
        info.warnings.push_back("fit: " + label + ": " + reason + "; no fit");
        return ordered_json{{"skipped", reason}};
    }
    const StableFit fit = fit_stable(pooled);
    const DistStats stats = dist_stats(pooled, fit.params);
    if (!fit.boundary_flags.empty()) {
        std::string flags;
        for (const std::string& f : fit.boundary_flags) {
            if (!flags.empty()) flags += ", ";
            flags += f;
        }
        info.warnings.push_back("fit: " + label + ": parameter at bound: " + flags);
    }
    write_histogram_csv(out / histogram_name, pooled, fit.params, k_bins);
    return fit_entry_json(fit, stats);
}

// ---- report helpers ---------------------------------------------------------

std::string display_case(ResponseCase c) {
    std::string name = case_name(c);
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    return name;
}

std::optional<double> read_overall_asymmetry(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    const std::string text = read_text_file(path);
    std::optional<double> overall;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        if (line.rfind("overall,", 0) == 0) overall = std::stod(line.substr(8));
        pos = end + 1;
    }
    return overall;
}

std::optional<std::vector<double>> read_spectrum_values(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    const std::string text = read_text_file(path);
    std::vector<double> values;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        if (!line.empty()) {
            if (header) {
                header = false;
            } else {
                values.push_back(std::stod(line));
            }
        }
        pos = end + 1;
    }
    return values;
}

// Left-aligned fixed-width table; first row is the header.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string text;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size()) {
                line.append(widths[c] - row[c].size() + 2, ' ');
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        text += line;
        text += '\n';
    }
    return text;
}

std::string cell_or_dash(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("-");
}

ordered_json json_or_null(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

// ---- run_pipeline helpers ---------------------------------------------------

[[noreturn]] void rethrow_stage(const std::string& stage, const fs::path& out) {
    const std::string ctx = "stage " + stage + " failed (run dir: " + out.string() + "): ";
    try {
        throw;
    } catch (const ParseError& e) {
        throw ParseError(ctx + e.what());
    } catch (const StreamError& e) {
        throw StreamError(ctx + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(ctx + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(ctx + e.what());
    } catch (const NumericError& e) {
        throw NumericError(ctx + e.what());
    } catch (const std::exception& e) {
        throw Error(ctx + e.what());
    }
}

ordered_json versions_json() {
    ordered_json v;
    v["compiler"] = __VERSION__;
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                 "." + std::to_string(EIGEN_MINOR_VERSION);
    v["boost"] = BOOST_LIB_VERSION;
    v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    return v;
}

// Data artifacts in the run directory: everything except the run-level
// manifest/timings/report files, plus the report files themselves (which are
// written immediately after the manifest).
std::vector<std::string> scan_artifacts(const fs::path& out) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(out)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json" || name == "timings.json" || name == "report.txt" ||
            name == "report.json") {
            continue;
        }
        names.push_back(name);
    }
    names.emplace_back("report.json");
    names.emplace_back("report.txt");
    std::sort(names.begin(), names.end());
    return names;
}

double mean_spread_dollars(const std::vector<QuoteRecord>& quotes) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const QuoteRecord& q : quotes) {
        if (q.two_sided()) {
            sum += static_cast<double>(q.ask - q.bid);
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / (static_cast<double>(n) * price4_per_dollar);
}

} // namespace

// ---- config -----------------------------------------------------------------

ResponseCase case_from_name(const std::string& name) {
    if (name == "all") return ResponseCase::all;
    if (name == "single") return ResponseCase::single;
    if (name == "multiple") return ResponseCase::multiple;
    if (name == "weighted") return ResponseCase::weighted;
    if (name == "random") return ResponseCase::random;
    throw ValidationError("unknown response case \"" + name +
                          "\" (expected all|single|multiple|weighted|random)");
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: top level must be a JSON object");
    check_keys(j, "config",
               {"input", "synth", "session", "cases", "k_bins", "q_groups", "random_L", "network",
                "seed", "out_dir"});

    PipelineConfig cfg;
    const bool has_input = j.contains("input");
    const bool has_synth = j.contains("synth");
    if (has_input == has_synth) {
        throw ParseError("config: exactly one of \"input\" and \"synth\" is required");
    }

    if (has_input) {
        const ordered_json& in = j["input"];
        if (!in.is_object()) throw ParseError("config: input must be an object");
        check_keys(in, "config.input", {"messages_csv", "has_header"});
        if (!in.contains("messages_csv")) {
            throw ParseError("config: input.messages_csv is required");
        }
        cfg.messages_csv = get_str(in["messages_csv"], "input.messages_csv");
        if (in.contains("has_header")) {
            cfg.messages_have_header = get_bool(in["has_header"], "input.has_header");
        }
    } else {
        const ordered_json& s = j["synth"];
        if (!s.is_object()) throw ParseError("config: synth must be an object");
        // No "seed" key here: the generator seed is derived from the root seed.
        check_keys(s, "config.synth",
                   {"n_stocks", "session_ms", "trades_per_minute", "quotes_per_minute",
                    "multiple_fraction", "response_noise", "base_price_dollars", "impacts",
                    "same_ms_collisions", "collision_rate"});
        cfg.use_synth = true;
        SynthConfig& sc = cfg.synth;
        if (!s.contains("n_stocks") || !s.contains("session_ms")) {
            throw ParseError("config: synth.n_stocks and synth.session_ms are required");
        }
        sc.n_stocks = static_cast<int>(get_int(s["n_stocks"], "synth.n_stocks"));
        sc.session_ms = get_int(s["session_ms"], "synth.session_ms");
        if (s.contains("trades_per_minute")) {
            sc.trades_per_minute = get_rates(s["trades_per_minute"], "synth.trades_per_minute");
        }
        if (s.contains("quotes_per_minute")) {
            sc.quotes_per_minute = get_rates(s["quotes_per_minute"], "synth.quotes_per_minute");
        }
        if (s.contains("multiple_fraction")) {
            sc.multiple_fraction = get_num(s["multiple_fraction"], "synth.multiple_fraction");
        }
        if (s.contains("response_noise")) {
            sc.response_noise = get_num(s["response_noise"], "synth.response_noise");
        }
        if (s.contains("base_price_dollars")) {
            sc.base_price_dollars = get_num(s["base_price_dollars"], "synth.base_price_dollars");
        }
        if (s.contains("same_ms_collisions")) {
            sc.same_ms_collisions = get_bool(s["same_ms_collisions"], "synth.same_ms_collisions");
        }
        if (s.contains("collision_rate")) {
            sc.collision_rate = get_num(s["collision_rate"], "synth.collision_rate");
        }
        if (s.contains("impacts")) {
            const ordered_json& arr = s["impacts"];
            if (!arr.is_array()) throw ParseError("config: synth.impacts must be an array");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string ctx = "synth.impacts[" + std::to_string(k) + "]";
                const ordered_json& e = arr[k];
                if (!e.is_object()) throw ParseError("config: " + ctx + " must be an object");
                check_keys(e, "config." + ctx,
                           {"source", "target", "delta", "probability", "sign_correlation"});
                if (!e.contains("source") || !e.contains("target") || !e.contains("delta")) {
                    throw ParseError("config: " + ctx + " needs source, target and delta");
                }
                PlantedImpact imp;
                imp.source = static_cast<int>(get_int(e["source"], ctx + ".source"));
                imp.target = static_cast<int>(get_int(e["target"], ctx + ".target"));
                imp.delta = get_num(e["delta"], ctx + ".delta");
                if (e.contains("probability")) {
                    imp.probability = get_num(e["probability"], ctx + ".probability");
                }
                if (e.contains("sign_correlation")) {
                    imp.sign_correlation = get_num(e["sign_correlation"], ctx + ".sign_correlation");
                }
                sc.impacts.push_back(imp);
            }
        }
    }

    if (j.contains("session")) {
        const ordered_json& s = j["session"];
        if (!s.is_object()) throw ParseError("config: session must be an object");
        check_keys(s, "config.session", {"start_ms", "end_ms"});
        if (s.contains("start_ms")) cfg.session_start_ms = get_int(s["start_ms"], "session.start_ms");
        if (s.contains("end_ms")) cfg.session_end_ms = get_int(s["end_ms"], "session.end_ms");
    }
    if (j.contains("cases")) {
        const ordered_json& arr = j["cases"];
        if (!arr.is_array()) throw ParseError("config: cases must be an array of strings");
        cfg.cases.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            cfg.cases.push_back(
                case_from_name(get_str(arr[k], "cases[" + std::to_string(k) + "]")));
        }
    }
    if (j.contains("k_bins")) cfg.k_bins = static_cast<int>(get_int(j["k_bins"], "k_bins"));
    if (j.contains("q_groups")) cfg.q_groups = static_cast<int>(get_int(j["q_groups"], "q_groups"));
    if (j.contains("random_L")) cfg.random_L = static_cast<int>(get_int(j["random_L"], "random_L"));
    if (j.contains("network")) {
        const ordered_json& nw = j["network"];
        if (!nw.is_object()) throw ParseError("config: network must be an object");
        check_keys(nw, "config.network", {"lo", "hi"});
        if (nw.contains("lo")) cfg.network_lo = get_num(nw["lo"], "network.lo");
        if (nw.contains("hi")) cfg.network_hi = get_num(nw["hi"], "network.hi");
    }
    if (j.contains("seed")) cfg.seed = get_uint(j["seed"], "seed");
    if (j.contains("out_dir")) cfg.out_dir = get_str(j["out_dir"], "out_dir");

    validate_config(cfg);
    return cfg;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    ordered_json j;
    if (cfg.use_synth) {
        ordered_json s;
        s["n_stocks"] = cfg.synth.n_stocks;
        s["session_ms"] = cfg.synth.session_ms;
        s["trades_per_minute"] = cfg.synth.trades_per_minute;
        s["quotes_per_minute"] = cfg.synth.quotes_per_minute;
        s["multiple_fraction"] = cfg.synth.multiple_fraction;
        s["response_noise"] = cfg.synth.response_noise;
        s["base_price_dollars"] = cfg.synth.base_price_dollars;
        ordered_json impacts = ordered_json::array();
        for (const PlantedImpact& imp : cfg.synth.impacts) {
            ordered_json e;
            e["source"] = imp.source;
            e["target"] = imp.target;
            e["delta"] = imp.delta;
            e["probability"] = imp.probability;
            e["sign_correlation"] = imp.sign_correlation;
            impacts.push_back(e);
        }
        s["impacts"] = impacts;
        s["same_ms_collisions"] = cfg.synth.same_ms_collisions;
        s["collision_rate"] = cfg.synth.collision_rate;
        j["synth"] = s;
    } else {
        ordered_json in;
        in["messages_csv"] = cfg.messages_csv;
        in["has_header"] = cfg.messages_have_header;
        j["input"] = in;
    }
    ordered_json session;
    session["start_ms"] = cfg.session_start_ms;
    session["end_ms"] = cfg.session_end_ms;
    j["session"] = session;
    ordered_json cases = ordered_json::array();
    for (ResponseCase c : cfg.cases) cases.push_back(case_name(c));
    j["cases"] = cases;
    j["k_bins"] = cfg.k_bins;
    j["q_groups"] = cfg.q_groups;
    j["random_L"] = cfg.random_L;
    ordered_json nw;
    nw["lo"] = cfg.network_lo;
    nw["hi"] = cfg.network_hi;
    j["network"] = nw;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

std::string config_hash_hex(const PipelineConfig& cfg) {
    return hex_u64(fnv1a64(pipeline_config_to_json(cfg)));
}

std::uint64_t stage_seed(std::uint64_t root_seed, const std::string& stage) {
    return splitmix64(root_seed ^ fnv1a64(stage));
}

// ---- stages -----------------------------------------------------------------

StageInfo stage_synth(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    if (!cfg.use_synth) throw ValidationError("synth: config has no synth block");
    fs::create_directories(out);
    StageInfo info;
    SynthConfig sc = cfg.synth;
    sc.seed = stage_seed(cfg.seed, "synth");
    const SynthResult result = generate_synthetic_flow(sc);
    write_synth_outputs(out, sc, result);
    info.facts["synth.seed"] = std::to_string(sc.seed);
    info.facts["synth.messages"] = std::to_string(result.messages.size());
    return info;
}

StageInfo stage_ingest(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;

    std::vector<ItchMessage> messages;
    if (cfg.use_synth) {
        SynthConfig sc = cfg.synth;
        sc.seed = stage_seed(cfg.seed, "synth");
        SynthResult result = generate_synthetic_flow(sc);
        write_synth_outputs(out, sc, result);
        info.facts["ingest.synth_seed"] = std::to_string(sc.seed);
        messages = std::move(result.messages);
    } else {
        const fs::path src = cfg.messages_csv;
        if (!fs::exists(src)) {
            throw ValidationError("ingest: input messages file not found: " + src.string());
        }
        messages = read_messages_csv(src, cfg.messages_have_header);
    }

    ReconstructResult rec = reconstruct(messages);
    if (rec.by_stock.empty()) throw ValidationError("ingest: no stocks in the message stream");

    const std::int64_t lo =
        cfg.session_start_ms >= 0 ? cfg.session_start_ms : std::numeric_limits<std::int64_t>::min();
    const std::int64_t hi =
        cfg.session_end_ms >= 0 ? cfg.session_end_ms : std::numeric_limits<std::int64_t>::max();
    const bool windowed = cfg.session_start_ms >= 0 || cfg.session_end_ms >= 0;

    std::vector<StockMeta> meta;
    std::size_t removed = 0;
    std::size_t total = 0;
    int index = 1;
    for (auto& [symbol, series] : rec.by_stock) {
        if (windowed) filter_session(series, lo, hi);
        const DedupeStats stats = dedupe_millisecond_trades(series.trades);
        removed += stats.removed;
        total += stats.total;
        StockMeta m;
        m.index = index++;
        m.symbol = symbol;
        m.n_trades = static_cast<std::int64_t>(series.trades.size());
        m.n_quotes = static_cast<std::int64_t>(series.quotes.size());
        m.mean_spread_dollars = mean_spread_dollars(series.quotes);
        meta.push_back(m);
        write_quotes_csv(out / ("quotes_" + symbol + ".csv"), series.quotes);
        write_trades_csv(out / ("trades_" + symbol + ".csv"), series.trades);
        if (series.trades.empty()) {
            info.warnings.push_back("ingest: stock " + symbol + " has no trades in the session");
        }
    }
    write_metadata_csv(out / "metadata.csv", meta);

    info.facts["ingest.n_stocks"] = std::to_string(meta.size());
    info.facts["ingest.n_messages"] = std::to_string(rec.n_messages);
    info.facts["ingest.n_skipped_messages"] = std::to_string(rec.n_skipped);
    info.facts["ingest.trades_before_dedupe"] = std::to_string(total);
    info.facts["ingest.trades_removed_shared_ms"] = std::to_string(removed);
    return info;
}

StageInfo stage_respond(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;

    const std::vector<StockMeta> meta = read_metadata_csv(need_file(out / "metadata.csv", "respond"));
    const int n = static_cast<int>(meta.size());
    if (n < 2) {
        throw ValidationError("respond: need at least 2 stocks, got " + std::to_string(n));
    }
    const std::vector<std::string> symbols = meta_symbols(meta);

    std::vector<std::vector<MidPoint>> mids(static_cast<std::size_t>(n));
    std::vector<std::vector<TradeEvent>> trades(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto quotes =
            read_quotes_csv(need_file(out / ("quotes_" + symbols[static_cast<std::size_t>(i)] + ".csv"),
                                      "respond"));
        mids[static_cast<std::size_t>(i)] = midpoint_series(quotes);
        trades[static_cast<std::size_t>(i)] = read_trades_csv(
            need_file(out / ("trades_" + symbols[static_cast<std::size_t>(i)] + ".csv"), "respond"));
    }

    ResponseBuilder builder(n);
    std::size_t n_obs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto obs = observations_for_pair(mids[static_cast<std::size_t>(i)],
                                                   trades[static_cast<std::size_t>(j)], i, j);
            n_obs += obs.size();
            builder.add(obs);
        }
    }
    const ResponseMatrices rm = builder.finalize();

    write_matrix_csv(out / "counts_all.csv", rm.counts_all.cast<double>(), symbols);
    write_matrix_csv(out / "counts_single.csv", rm.counts_single.cast<double>(), symbols);
    write_matrix_csv(out / "counts_multiple.csv", rm.counts_multiple.cast<double>(), symbols);
    write_matrix_csv(out / "weights.csv", rm.weights, symbols);

    for (ResponseCase c : cfg.cases) {
        if (c == ResponseCase::random) {
            const int L = cfg.random_L > 0 ? cfg.random_L : default_random_L(rm.counts_all);
            const std::uint64_t seed = stage_seed(cfg.seed, "random_response");
            write_matrix_csv(out / "responses_random.csv", random_response(n, L, seed), symbols);
            info.facts["respond.random_L"] = std::to_string(L);
            info.facts["respond.random_seed"] = std::to_string(seed);
        } else {
            write_matrix_csv(out / ("responses_" + case_name(c) + ".csv"), rm.matrix(c), symbols);
        }
    }

    std::size_t missing = 0;
    for (Eigen::Index i = 0; i < rm.all.rows(); ++i) {
        for (Eigen::Index j = 0; j < rm.all.cols(); ++j) {
            if (std::isnan(rm.all(i, j))) ++missing;
        }
    }
    if (missing > 0) {
        info.warnings.push_back("respond: " + std::to_string(missing) + " of " +
                                std::to_string(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) +
                                " cells have no observations");
    }
    info.facts["respond.observations"] = std::to_string(n_obs);
    info.facts["respond.cells_missing"] = std::to_string(missing);
    return info;
}

StageInfo stage_fit(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;

    ordered_json doc;
    doc["format"] = "stable-fits-v1";
    doc["k_bins"] = cfg.k_bins;
    ordered_json cases_doc = ordered_json::object();
    for (ResponseCase c : cfg.cases) {
        const std::string name = case_name(c);
        const LabeledMatrix lm = load_responses(out, c, "fit");
        const std::vector<double> pooled = offdiag_present(lm.values);
        cases_doc[name] = fit_or_skip(out, "case " + name, "histogram_" + name + ".csv", pooled,
                                      cfg.k_bins, info);
    }
    doc["cases"] = cases_doc;

    // Self responses: the diagonal of the all-trades matrix, one value per
    // stock, fitted only when the universe clears the 100-sample floor.
    const bool has_all =
        std::find(cfg.cases.begin(), cfg.cases.end(), ResponseCase::all) != cfg.cases.end();
    if (has_all) {
        const LabeledMatrix lm = load_responses(out, ResponseCase::all, "fit");
        doc["self"] = fit_or_skip(out, "self (diagonal)", "histogram_self.csv",
                                  diag_present(lm.values), cfg.k_bins, info);
    } else {
        doc["self"] = ordered_json{{"skipped", "requires the all case"}};
    }

    write_text_file(out / "stable_fits.json", doc.dump(2) + "\n");
    return info;
}

StageInfo stage_asym(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;
    for (ResponseCase c : cfg.cases) {
        const std::string name = case_name(c);
        const LabeledMatrix lm = load_responses(out, c, "asym");
        const AsymmetryReport report = asymmetry_report(lm.values, name);
        write_asymmetry_csv(out / ("asymmetry_" + name + ".csv"), report);
        if (report.imputed_cells > 0) {
            info.warnings.push_back("asym: case " + name + ": imputed " +
                                    std::to_string(report.imputed_cells) + " missing cells as 0");
        }
        info.facts["asym.overall." + name] = format_double(report.overall);
    }
    return info;
}

StageInfo stage_spectra(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;
    ordered_json b_doc;
    b_doc["format"] = "b-rescaled-v1";
    ordered_json b_cases = ordered_json::object();
    for (ResponseCase c : cfg.cases) {
        const std::string name = case_name(c);
        LabeledMatrix lm = load_responses(out, c, "spectra");
        std::size_t imputed = 0;
        for (Eigen::Index i = 0; i < lm.values.rows(); ++i) {
            for (Eigen::Index j = 0; j < lm.values.cols(); ++j) {
                if (std::isnan(lm.values(i, j))) {
                    lm.values(i, j) = 0.0;
                    ++imputed;
                }
            }
        }
        if (imputed > 0) {
            info.warnings.push_back("spectra: case " + name + ": imputed " +
                                    std::to_string(imputed) + " missing cells as 0");
        }
        const SymmetricAntisymmetric parts = decompose(lm.values);
        const std::vector<double> eigs = antisym_eigs(parts.antisymmetric);
        write_spectrum_csv(out / ("spectrum_" + name + ".csv"), eigs);
        try {
            const Histogram hist = zero_centered_histogram(eigs);
            const double b = fit_b_from_histogram(hist);
            write_spectrum_hist_csv(out / ("spectrum_hist_" + name + ".csv"), hist, b);
            b_cases[name] = b;
        } catch (const Error& e) {
            info.warnings.push_back("spectra: case " + name +
                                    ": histogram fit unavailable: " + e.what());
            b_cases[name] = nullptr;
        }
    }
    b_doc["b"] = b_cases;
    write_text_file(out / "b_rescaled.json", b_doc.dump(2) + "\n");
    return info;
}

StageInfo stage_entropy(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;

    const std::vector<StockMeta> meta = read_metadata_csv(need_file(out / "metadata.csv", "entropy"));
    const std::vector<std::string> symbols = meta_symbols(meta);
    std::vector<double> avg_trades;
    avg_trades.reserve(meta.size());
    for (const StockMeta& m : meta) avg_trades.push_back(static_cast<double>(m.n_trades));

    const ordered_json fits = parse_json_artifact(need_file(out / "stable_fits.json", "entropy"),
                                                  "entropy");
    for (ResponseCase c : cfg.cases) {
        const std::string name = case_name(c);
        if (!fits.contains("cases") || !fits["cases"].contains(name)) {
            throw ValidationError("entropy: stable_fits.json has no entry for case " + name +
                                  "; rerun the fit stage");
        }
        const ordered_json& entry = fits["cases"][name];
        if (!entry.contains("alpha")) {
            info.warnings.push_back("entropy: case " + name + " skipped (no stable fit)");
            continue;
        }
        StableParams params;
        params.alpha = entry["alpha"].get<double>();
        params.beta = entry["beta"].get<double>();
        params.gamma = entry["gamma"].get<double>();
        params.mu0 = entry["mu0"].get<double>();

        const LabeledMatrix lm = load_responses(out, c, "entropy");
        const ProbabilityMatrix pm = probability_matrix(lm.values, params, cfg.k_bins);
        if (pm.clamped > 0) {
            info.warnings.push_back("entropy: case " + name + ": " + std::to_string(pm.clamped) +
                                    " responses outside the bin range (clamped)");
            info.facts["entropy.clamped." + name] = std::to_string(pm.clamped);
        }
        const auto [h_row, h_col] = row_col_entropies(pm.p);
        const Eigen::MatrixXd impact_entropy = impact_entropy_matrix(h_row, h_col);
        write_matrix_csv(out / ("entropy_matrix_" + name + ".csv"), impact_entropy, symbols);
        const ScatterTable table = scatter_table(symbols, h_row, h_col, avg_trades);
        write_entropies_csv(out / ("entropies_" + name + ".csv"), table);
    }
    return info;
}

StageInfo stage_network(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    fs::create_directories(out);
    StageInfo info;
    for (ResponseCase c : cfg.cases) {
        const std::string name = case_name(c);
        const fs::path matrix_path = out / ("entropy_matrix_" + name + ".csv");
        if (!fs::exists(matrix_path)) {
            info.warnings.push_back("network: case " + name + " skipped (no entropy matrix)");
            continue;
        }
        const LabeledMatrix lm = read_matrix_csv(matrix_path);
        const ImpactNetwork net = threshold_network(lm.values, cfg.network_lo, cfg.network_hi);
        write_network_dot(out / ("network_" + name + ".dot"), net, lm.symbols);
        write_edges_csv(out / ("edges_threshold_" + name + ".csv"), net, 0, lm.symbols);
        const std::vector<GroupNetwork> groups = group_networks(lm.values, cfg.q_groups);
        write_edges_csv(out / ("edges_groups_" + name + ".csv"), groups, lm.symbols);
        write_connectivity_by_group_csv(out / ("connectivity_by_group_" + name + ".csv"), groups,
                                        lm.symbols);
        info.facts["network.threshold_edges." + name] = std::to_string(net.edges.size());
    }
    return info;
}

// ---- report -----------------------------------------------------------------

std::string report_run(const fs::path& out) {
    const fs::path manifest_path = out / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw ValidationError("report: run manifest not found: " + manifest_path.string() +
                              " (run the full pipeline first)");
    }
    const ordered_json manifest = parse_json_artifact(manifest_path, "report");
    if (!manifest.contains("config")) {
        throw ValidationError("report: manifest has no config echo: " + manifest_path.string());
    }
    const PipelineConfig cfg = pipeline_config_from_json(manifest["config"].dump());

    ordered_json fits = nullptr;
    if (fs::exists(out / "stable_fits.json")) {
        fits = parse_json_artifact(out / "stable_fits.json", "report");
    }

    struct CaseSummary {
        std::optional<double> mode, mean, median, skewness, overall, spectrum;
        std::optional<ordered_json> fit; // entry without the stats block
        std::string fit_gap;
    };

    std::vector<std::string> gaps;
    std::vector<CaseSummary> summaries;
    for (ResponseCase c : cfg.cases) {
        const std::string name = case_name(c);
        CaseSummary s;
        if (!fits.is_null() && fits.contains("cases") && fits["cases"].contains(name)) {
            const ordered_json& entry = fits["cases"][name];
            if (entry.contains("alpha")) {
                ordered_json fit = entry;
                if (fit.contains("stats")) {
                    const ordered_json& st = entry["stats"];
                    s.mode = st["mode"].get<double>();
                    s.mean = st["mean"].get<double>();
                    s.median = st["median"].get<double>();
                    s.skewness = st["skewness"].get<double>();
                    fit.erase("stats");
                }
                s.fit = fit;
            } else if (entry.contains("skipped")) {
                s.fit_gap = entry["skipped"].get<std::string>();
            }
        }
        if (!s.fit) {
            gaps.push_back("case " + name + ": stable fit and distribution stats unavailable" +
                           (s.fit_gap.empty() ? "" : " (" + s.fit_gap + ")"));
        }
        s.overall = read_overall_asymmetry(out / ("asymmetry_" + name + ".csv"));
        if (!s.overall) gaps.push_back("case " + name + ": overall asymmetry unavailable");
        const auto spectrum = read_spectrum_values(out / ("spectrum_" + name + ".csv"));
        if (spectrum && spectrum->size() >= 2) {
            s.spectrum = spectrum_entropy(*spectrum, cfg.k_bins);
        } else {
            gaps.push_back("case " + name + ": spectrum entropy unavailable");
        }
        summaries.push_back(std::move(s));
    }

    // ---- text ----
    std::vector<std::string> header{"measure"};
    for (ResponseCase c : cfg.cases) header.push_back(display_case(c));

    std::vector<std::vector<std::string>> summary_rows{header};
    const char* measure_names[] = {"mode",     "mean",
                                   "median",   "skewness",
                                   "overall_asymmetry", "spectrum_entropy"};
    for (int row = 0; row < 6; ++row) {
        std::vector<std::string> cells{measure_names[row]};
        for (const CaseSummary& s : summaries) {
            const std::optional<double>* fields[] = {&s.mode,     &s.mean,    &s.median,
                                                     &s.skewness, &s.overall, &s.spectrum};
            cells.push_back(cell_or_dash(*fields[row]));
        }
        summary_rows.push_back(std::move(cells));
    }

    std::vector<std::vector<std::string>> fit_rows{header};
    fit_rows[0][0] = "parameter";
    const char* param_names[] = {"alpha", "beta", "gamma", "mu0", "loglik", "n", "boundary"};
    for (int row = 0; row < 7; ++row) {
        std::vector<std::string> cells{param_names[row]};
        for (const CaseSummary& s : summaries) {
            if (!s.fit) {
                cells.emplace_back("-");
                continue;
            }
            const ordered_json& fit = *s.fit;
            switch (row) {
                case 0: cells.push_back(format_double(fit["alpha"].get<double>())); break;
                case 1: cells.push_back(format_double(fit["beta"].get<double>())); break;
                case 2: cells.push_back(format_double(fit["gamma"].get<double>())); break;
                case 3: cells.push_back(format_double(fit["mu0"].get<double>())); break;
                case 4: cells.push_back(format_double(fit["loglik"].get<double>())); break;
                case 5: cells.push_back(std::to_string(fit["n"].get<std::uint64_t>())); break;
                default: {
                    std::string flags;
                    for (const auto& f : fit["boundary_flags"]) {
                        if (!flags.empty()) flags += "|";
                        flags += f.get<std::string>();
                    }
                    cells.push_back(flags.empty() ? "-" : flags);
                }
            }
        }
        fit_rows.push_back(std::move(cells));
    }

    std::string self_line = "self fit (diagonal of the all case): unavailable";
    ordered_json self_json = nullptr;
    if (!fits.is_null() && fits.contains("self")) {
        const ordered_json& self = fits["self"];
        if (self.contains("alpha")) {
            self_json = self;
            self_json.erase("stats");
            self_line = "self fit (diagonal of the all case): alpha=" +
                        format_double(self["alpha"].get<double>()) +
                        " beta=" + format_double(self["beta"].get<double>()) +
                        " gamma=" + format_double(self["gamma"].get<double>()) +
                        " mu0=" + format_double(self["mu0"].get<double>()) +
                        " n=" + std::to_string(self["n"].get<std::uint64_t>());
        } else if (self.contains("skipped")) {
            self_json = self;
            self_line = "self fit (diagonal of the all case): skipped (" +
                        self["skipped"].get<std::string>() + ")";
            gaps.push_back("self: stable fit unavailable (" + self["skipped"].get<std::string>() +
                           ")");
        }
    } else {
        gaps.emplace_back("self: stable fit unavailable");
    }

    std::string text = "impact pipeline report\n";
    text += "config " + manifest.value("config_hash_fnv1a", std::string("-")) + ", seed " +
            (manifest.contains("root_seed") ? manifest["root_seed"].dump() : std::string("-")) +
            "\n\n";
    text += "response summary\n";
    text += render_table(summary_rows);
    text += "\nstable fit (off-diagonal responses)\n";
    text += render_table(fit_rows);
    text += "\n" + self_line + "\n";
    text += "\ngaps:\n";
    if (gaps.empty()) {
        text += "  none\n";
    } else {
        for (const std::string& g : gaps) text += "  " + g + "\n";
    }

    // ---- JSON (same numbers) ----
    ordered_json doc;
    doc["format"] = "report-v1";
    ordered_json case_list = ordered_json::array();
    for (ResponseCase c : cfg.cases) case_list.push_back(case_name(c));
    doc["cases"] = case_list;
    ordered_json summary = ordered_json::object();
    ordered_json fit_table = ordered_json::object();
    for (std::size_t k = 0; k < summaries.size(); ++k) {
        const std::string name = case_name(cfg.cases[k]);
        const CaseSummary& s = summaries[k];
        ordered_json row;
        row["mode"] = json_or_null(s.mode);
        row["mean"] = json_or_null(s.mean);
        row["median"] = json_or_null(s.median);
        row["skewness"] = json_or_null(s.skewness);
        row["overall_asymmetry"] = json_or_null(s.overall);
        row["spectrum_entropy"] = json_or_null(s.spectrum);
        summary[name] = row;
        fit_table[name] = s.fit ? *s.fit
                                : (s.fit_gap.empty() ? ordered_json(nullptr)
                                                     : ordered_json{{"skipped", s.fit_gap}});
    }
    doc["summary"] = summary;
    doc["fit"] = fit_table;
    doc["self_fit"] = self_json;
    doc["gaps"] = gaps;

    write_text_file(out / "report.txt", text);
    write_text_file(out / "report.json", doc.dump(2) + "\n");
    return text;
}

// ---- full run ---------------------------------------------------------------

RunOutcome run_pipeline(const PipelineConfig& cfg) {
    validate_config(cfg);
    const fs::path out = cfg.out_dir;
    fs::create_directories(out);

    using StageFn = StageInfo (*)(const PipelineConfig&, const fs::path&);
    const std::pair<const char*, StageFn> stages[] = {
        {"ingest", &stage_ingest},   {"respond", &stage_respond}, {"fit", &stage_fit},
        {"asym", &stage_asym},       {"spectra", &stage_spectra}, {"entropy", &stage_entropy},
        {"network", &stage_network}};

    std::vector<std::string> warnings;
    std::map<std::string, std::string> facts;
    ordered_json stage_ms = ordered_json::object();
    double total_ms = 0.0;
    for (const auto& [name, fn] : stages) {
        const auto t0 = std::chrono::steady_clock::now();
        StageInfo info;
        try {
            info = fn(cfg, out);
        } catch (...) {
            rethrow_stage(name, out);
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        stage_ms[name] = ms;
        total_ms += ms;
        warnings.insert(warnings.end(), info.warnings.begin(), info.warnings.end());
        facts.insert(info.facts.begin(), info.facts.end());
    }

    ordered_json manifest;
    manifest["format"] = "run-manifest-v1";
    manifest["generator"] = "impact-pipeline 1.0.0";
    manifest["versions"] = versions_json();
    manifest["root_seed"] = cfg.seed;
    ordered_json seeds = ordered_json::object();
    if (cfg.use_synth) seeds["synth"] = stage_seed(cfg.seed, "synth");
    if (std::find(cfg.cases.begin(), cfg.cases.end(), ResponseCase::random) != cfg.cases.end()) {
        seeds["random_response"] = stage_seed(cfg.seed, "random_response");
    }
    manifest["stage_seeds"] = seeds;
    manifest["config_hash_fnv1a"] = config_hash_hex(cfg);
    manifest["config"] = ordered_json::parse(pipeline_config_to_json(cfg));
    ordered_json facts_doc = ordered_json::object();
    for (const auto& [key, value] : facts) facts_doc[key] = value;
    manifest["facts"] = facts_doc;
    manifest["warnings"] = warnings;
    manifest["artifacts"] = scan_artifacts(out);
    write_text_file(out / "manifest.json", manifest.dump(2) + "\n");

    RunOutcome outcome;
    outcome.out_dir = out;
    outcome.warnings = std::move(warnings);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        outcome.report_text = report_run(out);
    } catch (...) {
        rethrow_stage("report", out);
    }
    const double report_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    stage_ms["report"] = report_ms;
    total_ms += report_ms;

    ordered_json timings;
    timings["format"] = "timings-v1";
    timings["stages"] = stage_ms;
    timings["total_ms"] = total_ms;
    write_text_file(out / "timings.json", timings.dump(2) + "\n");
    return outcome;
}

} // namespace impact

// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#ifndef UWBSYNC_SCENARIO_DIR
#define UWBSYNC_SCENARIO_DIR "scenarios"
#endif

namespace uwbsync {

ScenarioError::ScenarioError(std::string source, std::size_t line, std::string key, const std::string &message)
    : std::invalid_argument(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                            (key.empty() ? std::string() : "key '" + key + "': ") + message),
      source_(std::move(source)), line_(line), key_(std::move(key)), message_(message)
{
}

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
};

const std::map<std::string, std::set<std::string>> &known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"geometry",
         {"pulse_ns", "chip_ns", "frame_ns", "frames_per_symbol", "chips_per_frame", "sample_rate_ghz",
          "pulse_shape_factor"}},
        {"sync", {"m", "modes", "estimators", "coarse_step_ns", "t_corr_ns", "delta_ns", "k", "fine_window"}},
        {"channel",
         {"model", "single_tap", "cluster_rate_per_ns", "ray_rate_per_ns", "cluster_decay_ns", "ray_decay_ns",
          "cluster_fading_db", "ray_fading_db", "truncation_ns"}},
        {"users", {"interferers", "interferer_offsets_db"}},
        {"run",
         {"snr_db", "snr_reference", "trials", "seed", "acquisition_threshold_ns", "coarse_acquisition_threshold_ns", "epoch_law", "epoch_offset_ns",
          "workers"}},
    };
    return keys;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string &value)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ','))
        out.push_back(trim(item));
    return out;
}

class Document {
  public:
    Document(const std::string &text, std::string source) : source_(std::move(source))
    {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty())
                continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ScenarioError(source_, line_no, "", "malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                if (!known_keys().count(section))
                    throw ScenarioError(source_, line_no, "", "unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ScenarioError(source_, line_no, "", "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ScenarioError(source_, line_no, "", "empty key");
            if (section.empty() && key != "version")
                throw ScenarioError(source_, line_no, key, "only 'version' may appear before the first section");
            if (!section.empty() && !known_keys().at(section).count(key))
                throw ScenarioError(source_, line_no, key, "unknown key in [" + section + "]");
            if (value.empty())
                throw ScenarioError(source_, line_no, key, "missing value");
            const std::string full = qualified(section, key);
            if (entries_.count(full))
                throw ScenarioError(source_, line_no, key,
                                    "duplicate key (first set on line " + std::to_string(entries_[full].line) + ")");
            entries_[full] = Entry{value, line_no};
        }
    }

    const std::string &source() const { return source_; }

    const Entry *find(const std::string &section, const std::string &key) const
    {
        auto it = entries_.find(qualified(section, key));
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t line_of(const std::string &section, const std::string &key) const
    {
        const Entry *e = find(section, key);
        return e ? e->line : 0;
    }

    const Entry &require(const std::string &section, const std::string &key) const
    {
        const Entry *e = find(section, key);
        if (!e)
            throw ScenarioError(source_, 0, key,
                                "missing required key" + (section.empty() ? std::string() : " in [" + section + "]"));
        return *e;
    }

    [[noreturn]] void fail(const std::string &section, const std::string &key, const std::string &message) const
    {
        throw ScenarioError(source_, line_of(section, key), key, message);
    }

  private:
    static std::string qualified(const std::string &section, const std::string &key) { return section + "." + key; }

    std::string source_;
    std::map<std::string, Entry> entries_;
};

template <typename T>
bool parse_number(const std::string &s, T &out)
{
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if constexpr (std::is_floating_point_v<T>) {
        if (!s.empty() && *first == '+')
            ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

class Reader {
  public:
    explicit Reader(const Document &doc) : doc_(doc) {}

    template <typename T>
    void number(const std::string &section, const std::string &key, T &out, bool required = false) const
    {
        const Entry *e = required ? &doc_.require(section, key) : doc_.find(section, key);
        if (e)
            out = to_number<T>(*e, key);
    }

    template <typename T>
    void number_list(const std::string &section, const std::string &key, std::vector<T> &out) const
    {
        const Entry *e = doc_.find(section, key);
        if (!e)
            return;
        out.clear();
        for (const auto &item : split_list(e->value)) {
            Entry one{item, e->line};
            out.push_back(to_number<T>(one, key));
        }
    }

    template <typename E>
    void choice(const std::string &section, const std::string &key, E &out,
                const std::vector<std::pair<std::string, E>> &options) const
    {
        const Entry *e = doc_.find(section, key);
        if (e)
            out = pick(*e, key, options);
    }

    template <typename E>
    void choice_list(const std::string &section, const std::string &key, std::vector<E> &out,
                     const std::vector<std::pair<std::string, E>> &options) const
    {
        const Entry *e = doc_.find(section, key);
        if (!e)
            return;
        out.clear();
        for (const auto &item : split_list(e->value))
            out.push_back(pick(Entry{item, e->line}, key, options));
    }

    void boolean(const std::string &section, const std::string &key, bool &out) const
    {
        choice<bool>(section, key, out, {{"true", true}, {"false", false}});
    }

    void snr_list(const std::string &section, const std::string &key, std::vector<std::optional<double>> &out) const
    {
        const Entry &e = doc_.require(section, key);
        out.clear();
        for (const auto &item : split_list(e.value)) {
            if (item == "noiseless" || item == "inf") {
                out.emplace_back(std::nullopt);
                continue;
            }
            out.emplace_back(to_number<double>(Entry{item, e.line}, key));
        }
    }

  private:
    template <typename T>
    T to_number(const Entry &e, const std::string &key) const
    {
        T v{};
        if (!parse_number(e.value, v)) {
            const char *kind = std::is_floating_point_v<T> ? "a number" : "an integer";
            throw ScenarioError(doc_.source(), e.line, key, "expected " + std::string(kind) + ", got '" + e.value + "'");
        }
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(v))
                throw ScenarioError(doc_.source(), e.line, key, "value must be finite");
        }
        return v;
    }

    template <typename E>
    E pick(const Entry &e, const std::string &key, const std::vector<std::pair<std::string, E>> &options) const
    {
        std::string names;
        for (const auto &[name, value] : options) {
            if (name == e.value)
                return value;
            names += (names.empty() ? "" : "|") + name;
        }
        throw ScenarioError(doc_.source(), e.line, key, "expected one of " + names + ", got '" + e.value + "'");
    }

    const Document &doc_;
};

const std::vector<std::pair<std::string, Mode>> mode_names{{"nda", Mode::nda}, {"da", Mode::da}};
const std::vector<std::pair<std::string, Estimator>> estimator_names{{"coarse_only", Estimator::coarse_only},
                                                                     {"two_stage", Estimator::two_stage}};
const std::vector<std::pair<std::string, FineWindow>> window_names{{"corr", FineWindow::corr},
                                                                   {"symbol", FineWindow::symbol}};
const std::vector<std::pair<std::string, ChannelModel>> channel_names{{"cm1", ChannelModel::cm1},
                                                                      {"identity", ChannelModel::identity}};
const std::vector<std::pair<std::string, SnrReference>> reference_names{{"pulse", SnrReference::pulse},
                                                                        {"symbol", SnrReference::symbol}};
const std::vector<std::pair<std::string, EpochLaw>> epoch_names{{"uniform", EpochLaw::uniform},
                                                                {"grid", EpochLaw::grid}};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T> &items, F &&to_text)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? ", " : "") + std::string(to_text(items[i]));
    return out;
}

} // namespace

ScenarioConfig parse_scenario_text(const std::string &text, const std::string &source)
{
    const Document doc(text, source);
    const Reader rd(doc);

    int version = 0;
    rd.number("", "version", version, true);
    if (version != scenario_format_version)
        doc.fail("", "version", "unsupported format version " + std::to_string(version) + " (expected " +
                                    std::to_string(scenario_format_version) + ")");

    ScenarioConfig cfg;

    GeometryParams gp;
    rd.number("geometry", "pulse_ns", gp.pulse_ns, true);
    rd.number("geometry", "chip_ns", gp.chip_ns, true);
    rd.number("geometry", "frame_ns", gp.frame_ns, true);
    rd.number("geometry", "frames_per_symbol", gp.frames_per_symbol, true);
    rd.number("geometry", "chips_per_frame", gp.chips_per_frame, true);
    rd.number("geometry", "sample_rate_ghz", gp.sample_rate_ghz, true);
    rd.number("geometry", "pulse_shape_factor", cfg.pulse_shape_factor);
    try {
        cfg.geometry = FrameGeometry(gp);
    } catch (const GeometryError &e) {
        doc.fail("geometry", e.field(), e.what());
    }
    if (!(cfg.pulse_shape_factor > 0.0))
        doc.fail("geometry", "pulse_shape_factor", "pulse shape factor must be positive");
    try {
        make_pulse(cfg.geometry, cfg.pulse_shape_factor);
    } catch (const std::invalid_argument &e) {
        doc.fail("geometry", "pulse_ns", e.what());
    }

    rd.number_list("sync", "m", cfg.m_values);
    rd.choice_list("sync", "modes", cfg.modes, mode_names);
    rd.choice_list("sync", "estimators", cfg.estimators, estimator_names);
    rd.number("sync", "coarse_step_ns", cfg.sync.coarse_step_ns);
    rd.number("sync", "t_corr_ns", cfg.sync.t_corr_ns);
    rd.number("sync", "delta_ns", cfg.sync.delta_ns);
    rd.number("sync", "k", cfg.sync.k);
    rd.choice("sync", "fine_window", cfg.sync.window, window_names);
    if (cfg.m_values.empty())
        doc.fail("sync", "m", "at least one M value is required");
    for (int m : cfg.m_values) {
        SyncConfig s = cfg.sync;
        s.m = m;
        try {
            validate_sync(s, cfg.geometry);
        } catch (const SyncConfigError &e) {
            doc.fail("sync", e.field(), e.what());
        }
    }

    rd.choice("channel", "model", cfg.channel_model, channel_names);
    rd.boolean("channel", "single_tap", cfg.cm1.single_tap);
    rd.number("channel", "cluster_rate_per_ns", cfg.cm1.cluster_rate_per_ns);
    rd.number("channel", "ray_rate_per_ns", cfg.cm1.ray_rate_per_ns);
    rd.number("channel", "cluster_decay_ns", cfg.cm1.cluster_decay_ns);
    rd.number("channel", "ray_decay_ns", cfg.cm1.ray_decay_ns);
    rd.number("channel", "cluster_fading_db", cfg.cm1.cluster_fading_db);
    rd.number("channel", "ray_fading_db", cfg.cm1.ray_fading_db);
    rd.number("channel", "truncation_ns", cfg.truncation_ns);
    for (const char *key : {"cluster_rate_per_ns", "ray_rate_per_ns", "cluster_decay_ns", "ray_decay_ns"}) {
        double v = 0.0;
        rd.number("channel", key, v);
        if (doc.find("channel", key) && !(v > 0.0))
            doc.fail("channel", key, "must be positive");
    }
    if (cfg.cm1.cluster_fading_db < 0.0)
        doc.fail("channel", "cluster_fading_db", "must be non-negative");
    if (cfg.cm1.ray_fading_db < 0.0)
        doc.fail("channel", "ray_fading_db", "must be non-negative");
    if (!(cfg.truncation_ns > 0.0))
        doc.fail("channel", "truncation_ns", "must be positive");

    rd.number("users", "interferers", cfg.n_interferers);
    rd.number_list("users", "interferer_offsets_db", cfg.interferer_offsets_db);
    if (cfg.n_interferers < 0)
        doc.fail("users", "interferers", "must be non-negative");
    if (cfg.interferer_offsets_db.size() != static_cast<std::size_t>(cfg.n_interferers))
        doc.fail("users", doc.find("users", "interferer_offsets_db") ? "interferer_offsets_db" : "interferers",
                 "expected one SNR offset per interferer (" + std::to_string(cfg.n_interferers) + ")");

    rd.snr_list("run", "snr_db", cfg.snr_points_db);
    rd.choice("run", "snr_reference", cfg.snr_reference, reference_names);
    rd.number("run", "trials", cfg.trials, true);
    rd.number("run", "seed", cfg.master_seed, true);
    rd.number("run", "acquisition_threshold_ns", cfg.acquisition_threshold_ns);
    if (const auto *e = doc.find("run", "coarse_acquisition_threshold_ns"); e && e->value != "same") {
        double v = 0.0;
        rd.number("run", "coarse_acquisition_threshold_ns", v);
        if (!(v > 0.0))
            doc.fail("run", "coarse_acquisition_threshold_ns", "must be positive");
        cfg.coarse_threshold_ns = v;
    }
    rd.choice("run", "epoch_law", cfg.epoch_law, epoch_names);
    rd.number("run", "epoch_offset_ns", cfg.epoch_offset_ns);
    rd.number("run", "workers", cfg.workers);
    if (cfg.trials < 1)
        doc.fail("run", "trials", "must be at least 1");
    if (!(cfg.acquisition_threshold_ns > 0.0))
        doc.fail("run", "acquisition_threshold_ns", "must be positive");
    if (cfg.epoch_offset_ns < 0.0 || cfg.epoch_offset_ns >= cfg.geometry.symbol_ns())
        doc.fail("run", "epoch_offset_ns", "must lie in [0, T_s)");
    if (cfg.workers < 0)
        doc.fail("run", "workers", "must be non-negative");

    try {
        validate_scenario(cfg);
    } catch (const std::invalid_argument &e) {
        throw ScenarioError(source, 0, "", e.what());
    }
    return cfg;
}

ScenarioConfig parse_scenario(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open scenario file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_text(text.str(), path);
}

std::string emit_config(const ScenarioConfig &cfg)
{
    const GeometryParams &g = cfg.geometry.params();
    std::ostringstream out;
    out << "version = " << scenario_format_version << "\n";

    out << "\n[geometry]\n";
    out << "pulse_ns = " << fmt(g.pulse_ns) << "\n";
    out << "chip_ns = " << fmt(g.chip_ns) << "\n";
    out << "frame_ns = " << fmt(g.frame_ns) << "\n";
    out << "frames_per_symbol = " << g.frames_per_symbol << "\n";
    out << "chips_per_frame = " << g.chips_per_frame << "\n";
    out << "sample_rate_ghz = " << fmt(g.sample_rate_ghz) << "\n";
    out << "pulse_shape_factor = " << fmt(cfg.pulse_shape_factor) << "\n";

    out << "\n[sync]\n";
    out << "m = " << join(cfg.m_values, [](int m) { return std::to_string(m); }) << "\n";
    out << "modes = " << join(cfg.modes, [](Mode m) { return to_string(m); }) << "\n";
    out << "estimators = " << join(cfg.estimators, [](Estimator e) { return to_string(e); }) << "\n";
    out << "coarse_step_ns = " << fmt(cfg.sync.coarse_step_ns) << "\n";
    out << "t_corr_ns = " << fmt(cfg.sync.t_corr_ns) << "\n";
    out << "delta_ns = " << fmt(cfg.sync.delta_ns) << "\n";
    out << "k = " << cfg.sync.k << "\n";
    out << "fine_window = " << to_string(cfg.sync.window) << "\n";

    out << "\n[channel]\n";
    out << "model = " << to_string(cfg.channel_model) << "\n";
    out << "single_tap = " << (cfg.cm1.single_tap ? "true" : "false") << "\n";
    out << "cluster_rate_per_ns = " << fmt(cfg.cm1.cluster_rate_per_ns) << "\n";
    out << "ray_rate_per_ns = " << fmt(cfg.cm1.ray_rate_per_ns) << "\n";
    out << "cluster_decay_ns = " << fmt(cfg.cm1.cluster_decay_ns) << "\n";
    out << "ray_decay_ns = " << fmt(cfg.cm1.ray_decay_ns) << "\n";
    out << "cluster_fading_db = " << fmt(cfg.cm1.cluster_fading_db) << "\n";
    out << "ray_fading_db = " << fmt(cfg.cm1.ray_fading_db) << "\n";
    out << "truncation_ns = " << fmt(cfg.truncation_ns) << "\n";

    out << "\n[users]\n";
    out << "interferers = " << cfg.n_interferers << "\n";
    if (!cfg.interferer_offsets_db.empty())
        out << "interferer_offsets_db = " << join(cfg.interferer_offsets_db, fmt) << "\n";

    out << "\n[run]\n";
    out << "snr_db = "
        << join(cfg.snr_points_db, [](const std::optional<double> &s) { return s ? fmt(*s) : std::string("noiseless"); })
        << "\n";
    out << "snr_reference = " << to_string(cfg.snr_reference) << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "seed = " << cfg.master_seed << "\n";
    out << "acquisition_threshold_ns = " << fmt(cfg.acquisition_threshold_ns) << "\n";
    out << "coarse_acquisition_threshold_ns = "
        << (cfg.coarse_threshold_ns ? fmt(*cfg.coarse_threshold_ns) : std::string("same")) << "\n";
    out << "epoch_law = " << to_string(cfg.epoch_law) << "\n";
    out << "epoch_offset_ns = " << fmt(cfg.epoch_offset_ns) << "\n";
    out << "workers = " << cfg.workers << "\n";
    return out.str();
}

std::string bundled_scenario_dir()
{
    return UWBSYNC_SCENARIO_DIR;
}

} // namespace uwbsync

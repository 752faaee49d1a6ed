#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "cyclores/errors.hpp"
#include "cyclores/harness.hpp"
#include "cyclores/special_functions.hpp"

namespace cyclores {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"scenario", {"name", "description", "output_dir"}},
        {"model", {"h", "v0", "delta", "levels", "n_switch"}},
        {"initial", {"kind", "index", "amplitudes"}},
        {"schedule",
         {"snapshot_times", "series_t_min", "series_t_max", "series_samples", "average_t_min",
          "average_t_max", "average_samples", "average_h", "evaluation_time"}},
        {"observables", {"list"}},
        {"scan", {"inv_h_min", "inv_h_max", "points", "start_cell", "barrier_cell"}},
        {"husimi", {"states", "resolution", "levels"}},
    };
    return keys;
}

const std::vector<std::pair<Observable, std::string>>& observable_names() {
    static const std::vector<std::pair<Observable, std::string>> names = {
        {Observable::snapshot, "snapshot"},
        {Observable::cells, "cells"},
        {Observable::time_average, "time_average"},
        {Observable::penetration, "penetration"},
        {Observable::scan, "scan"},
        {Observable::spread_boundary, "spread_boundary"},
        {Observable::husimi, "husimi"},
        {Observable::spectrum, "spectrum"},
    };
    return names;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(value)) {
        throw ConfigError(field, fmt::format("expected a finite number, got '{}'", t));
    }
    return value;
}

std::size_t to_count(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(field, fmt::format("expected a non-negative integer, got '{}'", t));
    }
    return value;
}

std::vector<double> to_doubles(const std::string& field, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double(field, item));
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt::format("{:.17g}", values[i]);
    }
    return out;
}

const char* kind_name(InitialState::Kind k) {
    switch (k) {
        case InitialState::Kind::level: return "level";
        case InitialState::Kind::cell_center: return "cell_center";
        case InitialState::Kind::eigenstate: return "eigenstate";
        case InitialState::Kind::amplitudes: return "amplitudes";
    }
    return "?";
}

// Scan window of 2.5 dip periods centred on 1/h = 1/0.6, so the neighbouring dips are interior.
ScanSettings fig5_scan() {
    const double b2 = bessel_j1_zero(2);
    const double period = 2.0 / (b2 * b2);
    ScanSettings s;
    s.inv_h_min = 1.0 / 0.6 - 1.25 * period;
    s.inv_h_max = 1.0 / 0.6 + 1.25 * period;
    s.points = 400;
    return s;
}

ModelParams fig2_params() {
    ModelParams p;
    p.h = 0.6;
    p.v0 = 0.1;
    p.delta = 0.0;
    p.levels = 432;
    return p;
}

ModelParams small_params() {
    ModelParams p;
    p.h = 0.52;
    p.v0 = 0.1;
    p.delta = 0.0;
    p.levels = 100;
    return p;
}

}  // namespace

std::string to_string(Observable o) {
    for (const auto& [obs, name] : observable_names())
        if (obs == o) return name;
    return "?";
}

bool ScenarioConfig::wants(Observable o) const {
    return std::find(observables.begin(), observables.end(), o) != observables.end();
}

void ScenarioConfig::validate() const {
    try {
        params.validate();
    } catch (const DomainError& e) {
        std::string what = e.what();
        std::string key = "model";
        for (const char* k : {"h", "v0", "delta", "levels"}) {
            if (what.find(std::string("params.") + k + " ") != std::string::npos) key = std::string("model.") + k;
        }
        throw ConfigError(key, what);
    }
    const std::size_t n = params.levels;
    if (params.n_switch < 1) throw ConfigError("model.n_switch", "must be >= 1");

    switch (initial.kind) {
        case InitialState::Kind::level:
            if (initial.index >= n) throw ConfigError("initial.index", fmt::format("level {} outside [0, {})", initial.index, n));
            break;
        case InitialState::Kind::eigenstate:
            if (initial.index >= n) throw ConfigError("initial.index", fmt::format("eigenstate {} outside [0, {})", initial.index, n));
            break;
        case InitialState::Kind::cell_center:
            if (initial.index < 1) throw ConfigError("initial.index", "cells are numbered from 1");
            break;
        case InitialState::Kind::amplitudes: {
            if (initial.amplitudes.size() != n) {
                throw ConfigError("initial.amplitudes",
                                  fmt::format("expected {} values, got {}", n, initial.amplitudes.size()));
            }
            double norm = 0.0;
            for (double a : initial.amplitudes) norm += a * a;
            if (norm == 0.0) throw ConfigError("initial.amplitudes", "all amplitudes are zero");
            break;
        }
    }

    for (double t : schedule.snapshot_times)
        if (t < 0.0) throw ConfigError("schedule.snapshot_times", "times must be >= 0");
    if (!(schedule.series_t_min > 0.0 && schedule.series_t_max > schedule.series_t_min))
        throw ConfigError("schedule.series_t_min", "need 0 < series_t_min < series_t_max");
    if (schedule.series_samples < 2) throw ConfigError("schedule.series_samples", "must be >= 2");
    if (!(schedule.average_t_min > 0.0 && schedule.average_t_max > schedule.average_t_min))
        throw ConfigError("schedule.average_t_min", "need 0 < average_t_min < average_t_max");
    if (schedule.average_samples < 2) throw ConfigError("schedule.average_samples", "must be >= 2");
    for (double h : schedule.average_h)
        if (!(h > 0.0)) throw ConfigError("schedule.average_h", "values must be > 0");
    if (schedule.evaluation_time < 0.0) throw ConfigError("schedule.evaluation_time", "must be >= 0");

    if (observables.empty()) throw ConfigError("observables.list", "no observables requested");
    if ((wants(Observable::snapshot) || wants(Observable::spread_boundary)) && schedule.snapshot_times.empty())
        throw ConfigError("schedule.snapshot_times", "snapshot and spread_boundary need at least one time");

    if (scan.points < 1) throw ConfigError("scan.points", "scan grid is empty");
    if (!(scan.inv_h_min > 0.0 && scan.inv_h_max >= scan.inv_h_min))
        throw ConfigError("scan.inv_h_min", "need 0 < inv_h_min <= inv_h_max");
    if (scan.points > 1 && scan.inv_h_max == scan.inv_h_min)
        throw ConfigError("scan.inv_h_max", "several points need inv_h_max > inv_h_min");
    if (scan.start_cell < 1) throw ConfigError("scan.start_cell", "cells are numbered from 1");
    if (scan.barrier_cell <= scan.start_cell) throw ConfigError("scan.barrier_cell", "must be above start_cell");

    if (husimi.resolution < 2) throw ConfigError("husimi.resolution", "must be >= 2");
    for (const auto& s : husimi.states) {
        if (s == "bottom" || s == "top" || s == "initial") continue;
        const std::size_t q = to_count("husimi.states", s);
        if (q >= n) throw ConfigError("husimi.states", fmt::format("eigenstate {} outside [0, {})", q, n));
    }
    for (std::size_t i = 0; i < husimi.levels.size(); ++i) {
        if (!(husimi.levels[i] > 0.0)) throw ConfigError("husimi.levels", "levels must be positive");
        if (i > 0 && !(husimi.levels[i] > husimi.levels[i - 1]))
            throw ConfigError("husimi.levels", "levels must be strictly ascending");
    }
}

ScenarioConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}", e.line()), e.message());
    }

    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            if (body.empty()) throw ConfigError(section, "key outside of a section");
            throw ConfigError(section, "unknown section");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
        }
    }

    ScenarioConfig c;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
        return std::nullopt;
    };

    if (auto v = get("scenario.name")) c.name = *v;
    if (auto v = get("scenario.description")) c.description = *v;
    if (auto v = get("scenario.output_dir")) c.output_dir = *v;

    if (auto v = get("model.h")) c.params.h = to_double("model.h", *v);
    if (auto v = get("model.v0")) c.params.v0 = to_double("model.v0", *v);
    if (auto v = get("model.delta")) c.params.delta = to_double("model.delta", *v);
    if (auto v = get("model.levels")) c.params.levels = to_count("model.levels", *v);
    if (auto v = get("model.n_switch")) c.params.n_switch = to_count("model.n_switch", *v);

    if (auto v = get("initial.kind")) {
        if (*v == "level") c.initial.kind = InitialState::Kind::level;
        else if (*v == "cell_center") c.initial.kind = InitialState::Kind::cell_center;
        else if (*v == "eigenstate") c.initial.kind = InitialState::Kind::eigenstate;
        else if (*v == "amplitudes") c.initial.kind = InitialState::Kind::amplitudes;
        else throw ConfigError("initial.kind", fmt::format("unknown kind '{}' (level, cell_center, eigenstate, amplitudes)", *v));
    }
    if (auto v = get("initial.index")) c.initial.index = to_count("initial.index", *v);
    if (auto v = get("initial.amplitudes")) c.initial.amplitudes = to_doubles("initial.amplitudes", *v);
    if (c.initial.kind == InitialState::Kind::amplitudes && !get("initial.amplitudes"))
        throw ConfigError("initial.amplitudes", "required for kind = amplitudes");

    auto& s = c.schedule;
    if (auto v = get("schedule.snapshot_times")) s.snapshot_times = to_doubles("schedule.snapshot_times", *v);
    if (auto v = get("schedule.series_t_min")) s.series_t_min = to_double("schedule.series_t_min", *v);
    if (auto v = get("schedule.series_t_max")) s.series_t_max = to_double("schedule.series_t_max", *v);
    if (auto v = get("schedule.series_samples")) s.series_samples = to_count("schedule.series_samples", *v);
    if (auto v = get("schedule.average_t_min")) s.average_t_min = to_double("schedule.average_t_min", *v);
    if (auto v = get("schedule.average_t_max")) s.average_t_max = to_double("schedule.average_t_max", *v);
    if (auto v = get("schedule.average_samples")) s.average_samples = to_count("schedule.average_samples", *v);
    if (auto v = get("schedule.average_h")) s.average_h = to_doubles("schedule.average_h", *v);
    if (auto v = get("schedule.evaluation_time")) s.evaluation_time = to_double("schedule.evaluation_time", *v);

    if (auto v = get("observables.list")) {
        for (const auto& item : split_list(*v)) {
            bool found = false;
            for (const auto& [obs, name] : observable_names()) {
                if (name == item) {
                    if (!c.wants(obs)) c.observables.push_back(obs);
                    found = true;
                }
            }
            if (!found) throw ConfigError("observables.list", fmt::format("unknown observable '{}'", item));
        }
    }

    if (auto v = get("scan.inv_h_min")) c.scan.inv_h_min = to_double("scan.inv_h_min", *v);
    if (auto v = get("scan.inv_h_max")) c.scan.inv_h_max = to_double("scan.inv_h_max", *v);
    if (auto v = get("scan.points")) c.scan.points = to_count("scan.points", *v);
    if (auto v = get("scan.start_cell")) c.scan.start_cell = to_count("scan.start_cell", *v);
    if (auto v = get("scan.barrier_cell")) c.scan.barrier_cell = to_count("scan.barrier_cell", *v);

    if (auto v = get("husimi.states")) c.husimi.states = split_list(*v);
    if (auto v = get("husimi.resolution")) c.husimi.resolution = to_count("husimi.resolution", *v);
    if (auto v = get("husimi.levels")) {
        if (*v == "default") {
            c.husimi.default_levels = true;
        } else {
            c.husimi.default_levels = false;
            c.husimi.levels = to_doubles("husimi.levels", *v);
        }
    }

    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file", fmt::format("cannot open '{}'", path.string()));
    return parse_config(in);
}

std::string format_config(const ScenarioConfig& c) {
    std::string out;
    auto line = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
    auto num = [](double x) { return fmt::format("{:.17g}", x); };

    out += "[scenario]\n";
    line("name", c.name);
    if (!c.description.empty()) line("description", c.description);
    if (!c.output_dir.empty()) line("output_dir", c.output_dir.string());

    out += "\n[model]\n";
    line("h", num(c.params.h));
    line("v0", num(c.params.v0));
    line("delta", num(c.params.delta));
    line("levels", std::to_string(c.params.levels));
    line("n_switch", std::to_string(c.params.n_switch));

    out += "\n[initial]\n";
    line("kind", kind_name(c.initial.kind));
    if (c.initial.kind == InitialState::Kind::amplitudes) {
        line("amplitudes", join(c.initial.amplitudes));
    } else {
        line("index", std::to_string(c.initial.index));
    }

    const auto& s = c.schedule;
    out += "\n[schedule]\n";
    if (!s.snapshot_times.empty()) line("snapshot_times", join(s.snapshot_times));
    line("series_t_min", num(s.series_t_min));
    line("series_t_max", num(s.series_t_max));
    line("series_samples", std::to_string(s.series_samples));
    line("average_t_min", num(s.average_t_min));
    line("average_t_max", num(s.average_t_max));
    line("average_samples", std::to_string(s.average_samples));
    if (!s.average_h.empty()) line("average_h", join(s.average_h));
    line("evaluation_time", num(s.evaluation_time));

    out += "\n[observables]\n";
    std::string list;
    for (std::size_t i = 0; i < c.observables.size(); ++i) list += (i ? ", " : "") + to_string(c.observables[i]);
    line("list", list);

    out += "\n[scan]\n";
    line("inv_h_min", num(c.scan.inv_h_min));
    line("inv_h_max", num(c.scan.inv_h_max));
    line("points", std::to_string(c.scan.points));
    line("start_cell", std::to_string(c.scan.start_cell));
    line("barrier_cell", std::to_string(c.scan.barrier_cell));

    out += "\n[husimi]\n";
    std::string states;
    for (std::size_t i = 0; i < c.husimi.states.size(); ++i) states += (i ? ", " : "") + c.husimi.states[i];
    line("states", states);
    line("resolution", std::to_string(c.husimi.resolution));
    line("levels", c.husimi.default_levels ? "default" : join(c.husimi.levels));
    return out;
}

std::vector<ScenarioInfo> list_scenarios() {
    return {
        {"fig1", "QE spectrum and Husimi functions of the bottom and top eigenstates; N = 100, h = 0.52, V0 = 0.1"},
        {"fig2", "|C_n|^2 at t = 4e5 and 7e5 from the center of cell 1; h = 0.6, V0 = 0.1, N = 432"},
        {"fig3", "cell probabilities P_i(t), 200 log-spaced times in [1e2, 1e6]; parameters as fig2"},
        {"fig4", "time-averaged cell probabilities over [1e3, 1e6] at h = 0.52 and 0.6; V0 = 0.1, N = 432 as fig2/fig3"},
        {"fig5", "penetration from cell 2 into cells 3+ versus 1/h; t = 4e4, N = 100 (three cells), V0 = 0.1"},
        {"fig6", "near-resonance spreading from n0 = 6; detuning 0.003 (delta = -0.003), h = 0.52, V0 = 0.1, N = 100, t = 4e6"},
        {"custom", "user configuration file: run <path.ini>"},
    };
}

ScenarioConfig builtin_scenario(const std::string& name) {
    ScenarioConfig c;
    c.name = name;
    for (const auto& info : list_scenarios())
        if (info.name == name) c.description = info.description;

    if (name == "fig1") {
        c.params = small_params();
        c.observables = {Observable::spectrum, Observable::husimi};
    } else if (name == "fig2") {
        c.params = fig2_params();
        c.schedule.snapshot_times = {4e5, 7e5};
        c.observables = {Observable::snapshot};
    } else if (name == "fig3") {
        c.params = fig2_params();
        c.observables = {Observable::cells};
    } else if (name == "fig4") {
        c.params = fig2_params();
        c.schedule.average_h = {0.52, 0.6};
        c.observables = {Observable::time_average};
    } else if (name == "fig5") {
        c.params = small_params();
        c.scan = fig5_scan();
        c.observables = {Observable::scan};
    } else if (name == "fig6") {
        c.params = small_params();
        c.params.delta = -0.003;
        c.initial.kind = InitialState::Kind::level;
        c.initial.index = 6;
        c.schedule.snapshot_times = {4e6};
        c.observables = {Observable::snapshot, Observable::spread_boundary};
    } else if (name == "custom") {
        c.params = small_params();
        c.schedule.snapshot_times = {4e4};
        c.observables = {Observable::snapshot, Observable::spread_boundary};
    } else {
        throw ConfigError("scenario", fmt::format("unknown builtin '{}'; see `list`", name));
    }
    c.validate();
    return c;
}

}  // namespace cyclores

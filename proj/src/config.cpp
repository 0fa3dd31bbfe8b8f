// SPDX-License-Identifier: Apache-2.0

#include "lptvsync/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lptvsync {

using nlohmann::json;

namespace {

cplx parse_complex(const json& j, const std::string& field) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(field, "expected a number or a [re, im] pair");
}

json complex_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& field) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(field + "." + key, e.what());
    }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& field) {
    if (!obj.contains(key)) throw ConfigError(field.empty() ? key : field + "." + key, "missing");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(field.empty() ? key : field + "." + key, e.what());
    }
}

NoiseSpec parse_noise(const json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
    NoiseSpec n;
    n.variance_profile = require<std::vector<double>>(j, "variance_profile", field);
    n.shaping_fir = get_or<std::vector<double>>(j, "shaping_fir", {1.0}, field);
    try {
        (void)n.model();
    } catch (const Error& e) {
        throw ConfigError(field, e.what());
    }
    return n;
}

json noise_json(const NoiseSpec& n) {
    return json{{"variance_profile", n.variance_profile}, {"shaping_fir", n.shaping_fir}};
}

void check_optional_int(const json& geo, const char* key, int actual) {
    if (geo.contains(key) && geo.at(key).get<int>() != actual) {
        throw ConfigError(std::string("geometry.") + key,
                          "declared value " + std::to_string(geo.at(key).get<int>()) +
                              " disagrees with the channel/noise description (" +
                              std::to_string(actual) + ")");
    }
}

}  // namespace

FrameGeometry ScenarioConfig::geometry() const {
    return FrameGeometry::from(channel(), noise.model(), N, M);
}

SyncWord ScenarioConfig::sw() const {
    const Constellation c = constellation();
    CVec f;
    f.reserve(sync_word.size());
    for (std::size_t i : sync_word) {
        if (i >= c.size()) throw ConfigError("sync_word", "symbol index out of range");
        f.push_back(c[i]);
    }
    return SyncWord(std::move(f), c, geometry());
}

EqualizerConfig ScenarioConfig::equalizer() const {
    const FrameGeometry g = geometry();
    return EqualizerConfig::make(delta_p, L_EQ, constellation().gamma2(), g.P_h, g.L_ch, omega);
}

ScenarioConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config", "top level must be an object");

    ScenarioConfig c;
    c.name = get_or<std::string>(j, "name", "", "");

    if (!j.contains("constellation")) throw ConfigError("constellation", "missing");
    const json& cj = j.at("constellation");
    if (cj.is_string()) {
        c.constellation_name = cj.get<std::string>();
        if (c.constellation_name == "bpsk") {
            c.constellation_symbols = Constellation::bpsk().symbols();
        } else if (c.constellation_name == "qpsk") {
            c.constellation_symbols = Constellation::qpsk().symbols();
        } else {
            throw ConfigError("constellation", "unknown constellation '" + c.constellation_name + "'");
        }
    } else if (cj.is_array()) {
        c.constellation_name = "custom";
        for (const auto& s : cj) c.constellation_symbols.push_back(parse_complex(s, "constellation"));
    } else {
        throw ConfigError("constellation", "expected a name or a list of symbols");
    }
    try {
        (void)c.constellation();
    } catch (const Error& e) {
        throw ConfigError("constellation", e.what());
    }

    if (!j.contains("geometry")) throw ConfigError("geometry", "missing");
    const json& geo = j.at("geometry");
    c.N = require<int>(geo, "N", "geometry");
    c.M = require<int>(geo, "M", "geometry");

    if (!j.contains("channel")) throw ConfigError("channel", "missing");
    const json& taps = j.at("channel").contains("taps") ? j.at("channel").at("taps") : json();
    if (!taps.is_array() || taps.empty()) throw ConfigError("channel.taps", "expected a list of phases");
    for (const auto& phase : taps) {
        if (!phase.is_array()) throw ConfigError("channel.taps", "each phase must be a list of taps");
        CVec p;
        for (const auto& t : phase) p.push_back(parse_complex(t, "channel.taps"));
        c.channel_taps.push_back(std::move(p));
    }
    try {
        (void)c.channel();
    } catch (const Error& e) {
        throw ConfigError("channel", e.what());
    }

    if (!j.contains("noise")) throw ConfigError("noise", "missing");
    c.noise = parse_noise(j.at("noise"), "noise");
    if (j.contains("receiver_noise") && !j.at("receiver_noise").is_null()) {
        c.receiver_noise = parse_noise(j.at("receiver_noise"), "receiver_noise");
    }

    FrameGeometry g;
    try {
        g = c.geometry();
    } catch (const Error& e) {
        throw ConfigError("geometry", e.what());
    }
    check_optional_int(geo, "P_h", g.P_h);
    check_optional_int(geo, "P_z", g.P_z);
    check_optional_int(geo, "L_h", g.L_h);
    check_optional_int(geo, "L_z", g.L_z);
    if (c.receiver_noise) {
        const NoiseModel rn = c.receiver_noise->model();
        if (g.N % rn.period() != 0 || rn.memory() > g.L_ch) {
            throw ConfigError("receiver_noise", "assumed noise model does not fit the frame geometry");
        }
    }

    if (!j.contains("sync_word")) throw ConfigError("sync_word", "missing");
    const json& sj = j.at("sync_word");
    const Constellation cons = c.constellation();
    try {
        if (sj.is_string()) {
            const SyncWord sw = SyncWord::from_bpsk_string(sj.get<std::string>(), cons, g);
            c.sync_word = sw.symbol_indices();
        } else if (sj.is_array()) {
            for (const auto& v : sj) {
                const auto idx = v.get<long long>();
                if (idx < 0 || idx >= static_cast<long long>(cons.size())) {
                    throw ConfigError("sync_word", "symbol index out of range");
                }
                c.sync_word.push_back(static_cast<std::size_t>(idx));
            }
            (void)c.sw();
        } else {
            throw ConfigError("sync_word", "expected a list of symbol indices or a +1/-1 string");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("sync_word", e.what());
    } catch (const json::exception& e) {
        throw ConfigError("sync_word", e.what());
    }

    const json det = j.value("detectors", json::object());
    c.e_r0 = get_or<int>(det, "e_r0", 0, "detectors");
    c.e_r1 = get_or<int>(det, "e_r1", 0, "detectors");
    c.materialization_cap = get_or<std::uint64_t>(det, "materialization_cap", c.materialization_cap, "detectors");
    if (c.e_r0 < 0 || c.e_r0 > g.N) throw ConfigError("detectors.e_r0", "must lie in [0, N]");
    if (c.e_r1 < 0 || c.e_r1 > g.L_ch) throw ConfigError("detectors.e_r1", "must lie in [0, L_ch]");

    if (!j.contains("equalizer")) throw ConfigError("equalizer", "missing");
    const json& eq = j.at("equalizer");
    c.delta_p = get_or<double>(eq, "delta_p", c.delta_p, "equalizer");
    c.L_EQ = require<int>(eq, "L_EQ", "equalizer");
    if (eq.contains("omega") && !eq.at("omega").is_null()) c.omega = require<int>(eq, "omega", "equalizer");
    (void)c.equalizer();

    c.snr_db = get_or<std::vector<double>>(j, "snr_db", {}, "");
    c.search_snr_db = get_or<double>(j, "search_snr_db", c.search_snr_db, "");
    c.validate_snr_db = get_or<double>(j, "validate_snr_db", c.validate_snr_db, "");
    const json tr = j.value("trials", json::object());
    c.trials_roc = get_or<std::uint64_t>(tr, "roc", c.trials_roc, "trials");
    c.trials_search = get_or<std::uint64_t>(tr, "search", c.trials_search, "trials");
    c.trials_validate = get_or<std::uint64_t>(tr, "validate", c.trials_validate, "trials");
    if (c.trials_roc == 0 || c.trials_search == 0 || c.trials_validate == 0) {
        throw ConfigError("trials", "trial counts must be positive");
    }
    c.histogram_bins = get_or<int>(j, "histogram_bins", c.histogram_bins, "");
    if (c.histogram_bins <= 0) throw ConfigError("histogram_bins", "must be positive");
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "");
    return c;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    if (c.constellation_name == "bpsk" || c.constellation_name == "qpsk") {
        j["constellation"] = c.constellation_name;
    } else {
        json syms = json::array();
        for (const auto& s : c.constellation_symbols) syms.push_back(complex_json(s));
        j["constellation"] = syms;
    }
    j["geometry"] = {{"N", c.N}, {"M", c.M}};
    json taps = json::array();
    for (const auto& phase : c.channel_taps) {
        json p = json::array();
        for (const auto& t : phase) p.push_back(complex_json(t));
        taps.push_back(p);
    }
    j["channel"] = {{"taps", taps}};
    j["noise"] = noise_json(c.noise);
    if (c.receiver_noise) j["receiver_noise"] = noise_json(*c.receiver_noise);
    j["sync_word"] = c.sync_word;
    j["detectors"] = {{"e_r0", c.e_r0}, {"e_r1", c.e_r1}, {"materialization_cap", c.materialization_cap}};
    j["equalizer"] = {{"delta_p", c.delta_p}, {"L_EQ", c.L_EQ}};
    if (c.omega) j["equalizer"]["omega"] = *c.omega;
    j["snr_db"] = c.snr_db;
    j["search_snr_db"] = c.search_snr_db;
    j["validate_snr_db"] = c.validate_snr_db;
    j["trials"] = {{"roc", c.trials_roc}, {"search", c.trials_search}, {"validate", c.trials_validate}};
    j["histogram_bins"] = c.histogram_bins;
    j["seed"] = c.seed;
    return j.dump(2);
}

std::string describe_derived(const ScenarioConfig& c) {
    const FrameGeometry g = c.geometry();
    const EqualizerConfig e = c.equalizer();
    std::ostringstream os;
    os << "P_h=" << g.P_h << " P_z=" << g.P_z << " L_ch=" << g.L_ch << " K=" << g.K
       << " L_sw=" << g.L_sw << " L_tot=" << g.L_tot << " J=" << e.J << " xi=" << e.xi
       << " psi=" << e.psi << " omega=" << e.omega << " L_est=" << e.L_est
       << " gamma2=" << c.constellation().gamma2();
    return os.str();
}

}  // namespace lptvsync

// SPDX-License-Identifier: Apache-2.0
//
// mmalign: sequential mmWave beam alignment simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mmalign/config.hpp"

#include "json.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mmalign
{

using nlohmann::json;

namespace
{

const std::set<std::string> known_keys = {
    "num_antennas",    "spacing_over_wavelength",
    "theta_min_deg",   "theta_max_deg",
    "resolution_inv",  "codebook_ridge",
    "noise_variance",  "snr_db",
    "fading_model",    "fading_g",
    "coherence_time_ms", "slot_duration_ms",
    "rician_k",        "gamma_re",
    "gamma_im",        "fading_mean_re",
    "fading_mean_im",  "fading_variance",
    "prior_mean_re",   "prior_mean_im",
    "prior_variance",  "mismatch_mean_re",
    "mismatch_mean_im", "mismatch_variance",
    "alpha_r_min",     "alpha_r_max",
    "alpha_z_min",     "alpha_z_max",
    "alpha_n_r",       "alpha_n_z",
    "tau",             "frame_slots",
    "algorithms",      "trials",
    "seed",            "paired_randomness",
    "off_grid",
};

template <class T>
T get_as(const json& doc, const char* key)
{
    try
    {
        return doc.at(key).get<T>();
    }
    catch (const json::exception& e)
    {
        throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
    }
}

template <class T>
void read(const json& doc, const char* key, T& dst)
{
    if (doc.contains(key))
        dst = get_as<T>(doc, key);
}

void read_complex(const json& doc, const char* re, const char* im, cplx& dst)
{
    double r = dst.real();
    double i = dst.imag();
    read(doc, re, r);
    read(doc, im, i);
    dst = {r, i};
}

bool has_any(const json& doc, std::initializer_list<const char*> keys)
{
    for (const char* k : keys)
        if (doc.contains(k))
            return true;
    return false;
}

std::string_view fading_model_name(const FadingProcess& f)
{
    switch (f.index())
    {
    case 0:
        return "static_known";
    case 1:
        return "iid_gaussian";
    case 2:
        return "static_unknown";
    default:
        return "ar1_rician";
    }
}

FadingProcess read_fading(const json& doc)
{
    std::string model = "ar1_rician";
    read(doc, "fading_model", model);

    const bool mean_keys = has_any(doc, {"fading_mean_re", "fading_mean_im", "fading_variance"});
    const bool ar1_keys = has_any(doc, {"fading_g", "coherence_time_ms", "slot_duration_ms", "rician_k", "gamma_re",
                                        "gamma_im"});

    if (model == "ar1_rician")
    {
        if (mean_keys)
            throw std::invalid_argument("fading_mean_*/fading_variance do not apply to fading_model ar1_rician");
        AR1Rician p{g_from_coherence(default_coherence_time_ms, default_slot_duration_ms), 10.0, 1.0};
        if (doc.contains("fading_g"))
        {
            if (has_any(doc, {"coherence_time_ms", "slot_duration_ms"}))
                throw std::invalid_argument("give either fading_g or coherence_time_ms/slot_duration_ms, not both");
            read(doc, "fading_g", p.g);
        }
        else
        {
            double tc = default_coherence_time_ms;
            double slot = default_slot_duration_ms;
            read(doc, "coherence_time_ms", tc);
            read(doc, "slot_duration_ms", slot);
            p.g = g_from_coherence(tc, slot);
        }
        read(doc, "rician_k", p.k_r);
        read_complex(doc, "gamma_re", "gamma_im", p.gamma);
        return p;
    }
    if (ar1_keys)
        throw std::invalid_argument("AR-1 keys only apply to fading_model ar1_rician");
    if (model == "iid_gaussian")
    {
        IIDGaussian p;
        read_complex(doc, "fading_mean_re", "fading_mean_im", p.mean);
        read(doc, "fading_variance", p.variance);
        return p;
    }
    if (model == "static_unknown")
    {
        StaticUnknown p;
        read_complex(doc, "fading_mean_re", "fading_mean_im", p.prior_mean);
        read(doc, "fading_variance", p.prior_variance);
        return p;
    }
    if (model == "static_known")
    {
        if (doc.contains("fading_variance"))
            throw std::invalid_argument("fading_variance does not apply to fading_model static_known");
        StaticKnown p;
        read_complex(doc, "fading_mean_re", "fading_mean_im", p.alpha_star);
        return p;
    }
    throw std::invalid_argument("unknown fading_model '" + model +
                                "' (expected ar1_rician, iid_gaussian, static_unknown, static_known)");
}

// Moments of the fading process, used for the Kalman prior and the
// mismatched guess when the file does not set them.
std::pair<cplx, double> fading_moments(const FadingProcess& f)
{
    switch (f.index())
    {
    case 0:
        return {std::get<StaticKnown>(f).alpha_star, 0.0};
    case 1:
        return {std::get<IIDGaussian>(f).mean, std::get<IIDGaussian>(f).variance};
    case 2:
        return {std::get<StaticUnknown>(f).prior_mean, std::get<StaticUnknown>(f).prior_variance};
    default: {
        const auto& p = std::get<AR1Rician>(f);
        return {rician_mean(p.k_r, p.gamma), rician_variance(p.k_r)};
    }
    }
}

double parse_number(std::string_view s, std::string_view what)
{
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

} // namespace

ScenarioConfig parse_config_text(std::string_view text)
{
    ScenarioConfig cfg;
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        return cfg;

    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw std::invalid_argument("config must be a JSON object");
    for (const auto& item : doc.items())
        if (!known_keys.contains(item.key()))
            throw std::invalid_argument("unknown config key '" + item.key() + "'");

    read(doc, "num_antennas", cfg.array.num_antennas);
    read(doc, "spacing_over_wavelength", cfg.array.spacing_over_wavelength);
    if (doc.contains("theta_min_deg"))
        cfg.theta_min = deg_to_rad(get_as<double>(doc, "theta_min_deg"));
    if (doc.contains("theta_max_deg"))
        cfg.theta_max = deg_to_rad(get_as<double>(doc, "theta_max_deg"));
    read(doc, "resolution_inv", cfg.resolution_inv);
    read(doc, "codebook_ridge", cfg.codebook_ridge);
    read(doc, "noise_variance", cfg.noise_variance);
    read(doc, "snr_db", cfg.snr_db);

    cfg.fading = read_fading(doc);
    const auto [mean, var] = fading_moments(cfg.fading);
    cfg.prior_mean = mean;
    cfg.prior_variance = var > 0.0 ? var : cfg.prior_variance;
    cfg.mismatch_mean = mean;
    cfg.mismatch_variance = var;
    read_complex(doc, "prior_mean_re", "prior_mean_im", cfg.prior_mean);
    read(doc, "prior_variance", cfg.prior_variance);
    read_complex(doc, "mismatch_mean_re", "mismatch_mean_im", cfg.mismatch_mean);
    read(doc, "mismatch_variance", cfg.mismatch_variance);

    read(doc, "alpha_r_min", cfg.alpha_grid.r_min);
    read(doc, "alpha_r_max", cfg.alpha_grid.r_max);
    read(doc, "alpha_z_min", cfg.alpha_grid.z_min);
    read(doc, "alpha_z_max", cfg.alpha_grid.z_max);
    read(doc, "alpha_n_r", cfg.alpha_grid.n_r);
    read(doc, "alpha_n_z", cfg.alpha_grid.n_z);

    read(doc, "tau", cfg.tau);
    read(doc, "frame_slots", cfg.frame_slots);
    if (doc.contains("algorithms"))
    {
        cfg.algorithms.clear();
        for (const auto& name : get_as<std::vector<std::string>>(doc, "algorithms"))
            cfg.algorithms.push_back(parse_algorithm(name));
    }
    read(doc, "trials", cfg.trials);
    read(doc, "seed", cfg.seed);
    read(doc, "paired_randomness", cfg.paired_randomness);
    read(doc, "off_grid", cfg.off_grid);
    return cfg;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_overrides(ScenarioConfig& cfg, const ConfigOverrides& o)
{
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.trials)
        cfg.trials = *o.trials;
    if (o.snr_db)
        cfg.snr_db = *o.snr_db;
    if (o.algorithms)
        cfg.algorithms = *o.algorithms;
    if (o.paired_randomness)
        cfg.paired_randomness = *o.paired_randomness;
    if (o.tau)
        cfg.tau = *o.tau;
}

ScenarioConfig resolve_config(const std::optional<std::filesystem::path>& path, const ConfigOverrides& overrides)
{
    ScenarioConfig cfg = path ? parse_config_file(*path) : ScenarioConfig{};
    apply_overrides(cfg, overrides);
    cfg.validate();
    return cfg;
}

std::vector<double> parse_snr_range(std::string_view spec)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = spec.find(':', start);
        parts.push_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    if (parts.size() == 1)
        return {parse_number(parts[0], "SNR value")};
    if (parts.size() != 3)
        throw std::invalid_argument("SNR range must be LO:HI:STEP (got '" + std::string(spec) + "')");

    const double lo = parse_number(parts[0], "SNR lower bound");
    const double hi = parse_number(parts[1], "SNR upper bound");
    const double step = parse_number(parts[2], "SNR step");
    if (!(step > 0.0))
        throw std::invalid_argument("SNR step must be positive");
    if (hi < lo)
        throw std::invalid_argument("SNR upper bound is below the lower bound");

    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(lo + double(i) * step);
    return out;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view spec)
{
    std::vector<Algorithm> out;
    std::size_t start = 0;
    while (start <= spec.size())
    {
        const auto pos = spec.find(',', start);
        const auto name = spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (name.empty())
            throw std::invalid_argument("empty entry in algorithm list");
        out.push_back(parse_algorithm(name));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

namespace
{
json config_json(const ScenarioConfig& cfg)
{
    json j = json::object();
    j["num_antennas"] = cfg.array.num_antennas;
    j["spacing_over_wavelength"] = cfg.array.spacing_over_wavelength;
    j["theta_min_deg"] = rad_to_deg(cfg.theta_min);
    j["theta_max_deg"] = rad_to_deg(cfg.theta_max);
    j["resolution_inv"] = cfg.resolution_inv;
    j["codebook_ridge"] = cfg.codebook_ridge;
    j["noise_variance"] = cfg.noise_variance;
    j["snr_db"] = cfg.snr_db;

    j["fading_model"] = fading_model_name(cfg.fading);
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, AR1Rician>)
            {
                j["fading_g"] = p.g;
                j["rician_k"] = p.k_r;
                j["gamma_re"] = p.gamma.real();
                j["gamma_im"] = p.gamma.imag();
            }
            else if constexpr (std::is_same_v<P, StaticKnown>)
            {
                j["fading_mean_re"] = p.alpha_star.real();
                j["fading_mean_im"] = p.alpha_star.imag();
            }
            else if constexpr (std::is_same_v<P, IIDGaussian>)
            {
                j["fading_mean_re"] = p.mean.real();
                j["fading_mean_im"] = p.mean.imag();
                j["fading_variance"] = p.variance;
            }
            else
            {
                j["fading_mean_re"] = p.prior_mean.real();
                j["fading_mean_im"] = p.prior_mean.imag();
                j["fading_variance"] = p.prior_variance;
            }
        },
        cfg.fading);

    j["prior_mean_re"] = cfg.prior_mean.real();
    j["prior_mean_im"] = cfg.prior_mean.imag();
    j["prior_variance"] = cfg.prior_variance;
    j["mismatch_mean_re"] = cfg.mismatch_mean.real();
    j["mismatch_mean_im"] = cfg.mismatch_mean.imag();
    j["mismatch_variance"] = cfg.mismatch_variance;

    j["alpha_r_min"] = cfg.alpha_grid.r_min;
    j["alpha_r_max"] = cfg.alpha_grid.r_max;
    j["alpha_z_min"] = cfg.alpha_grid.z_min;
    j["alpha_z_max"] = cfg.alpha_grid.z_max;
    j["alpha_n_r"] = cfg.alpha_grid.n_r;
    j["alpha_n_z"] = cfg.alpha_grid.n_z;

    j["tau"] = cfg.tau;
    j["frame_slots"] = cfg.frame_slots;
    json algs = json::array();
    for (Algorithm a : cfg.algorithms)
        algs.push_back(std::string(algorithm_name(a)));
    j["algorithms"] = algs;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["paired_randomness"] = cfg.paired_randomness;
    j["off_grid"] = cfg.off_grid;
    return j;
}
} // namespace

std::string config_to_json(const ScenarioConfig& cfg, int indent)
{
    return config_json(cfg).dump(indent);
}

std::string RunManifest::to_json() const
{
    json j;
    j["tool"] = "align";
    j["version"] = version;
    j["command"] = command;
    j["seed"] = config.seed;
    j["timestamp"] = timestamp;
    j["outputs"] = outputs;
    j["config"] = config_json(config);
    return j.dump(2) + "\n";
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), std::streamsize(contents.size()));
        out.flush();
        if (!out)
        {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

} // namespace mmalign

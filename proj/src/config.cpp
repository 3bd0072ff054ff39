#include "depthpipe/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "depthpipe/errors.hpp"

namespace depthpipe {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        if (value.empty() || value[0] == '-') throw std::invalid_argument("negative");
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a real number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::uint32_t> parse_uint_list(const std::string& key, const std::string& value) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(key + ": empty list element in '" + value + "'");
        out.push_back(static_cast<std::uint32_t>(parse_uint(key, item)));
    }
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

}  // namespace

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "normalize.mode") {
        if (value != "stdn" && value != "intra" && value != "none")
            throw ConfigError("normalize.mode: expected stdn, intra, or none, got '" + value + "'");
        normalize_mode = value;
    } else if (key == "normalize.window") {
        stdn.window_n = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "normalize.bands") {
        stdn.bands = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "normalize.percentile") {
        stdn.percentile_p = parse_real(key, value);
    } else if (key == "motion.clip_len") {
        clip_len = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.extractor") {
        extractor = value;
    } else if (key == "features.flat_dim") {
        flat_dim = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.map_size") {
        map_size = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.channels") {
        channels = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.pca_dim") {
        pca_dim = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.vlad_k") {
        vlad_k = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.vlad_dim") {
        vlad_dim = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.spp_levels") {
        spp_levels = parse_uint_list(key, value);
    } else if (key == "features.stride") {
        stride = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.whiten") {
        whiten = parse_bool(key, value);
    } else if (key == "features.max_fit_descriptors") {
        max_fit_descriptors = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "features.paths") {
        if (value == "spatial")
            paths = PathSelect::Spatial;
        else if (value == "temporal")
            paths = PathSelect::Temporal;
        else if (value == "spatial,temporal" || value == "both")
            paths = PathSelect::Both;
        else
            throw ConfigError("features.paths: expected spatial, temporal, or spatial,temporal; got '" +
                              value + "'");
    } else if (key == "classify.svm_c") {
        svm_c = parse_real(key, value);
    } else if (key == "classify.grid_step") {
        grid_step = parse_real(key, value);
    } else if (key == "classify.seed") {
        seed = parse_uint(key, value);
    } else if (key == "fusion.mode") {
        if (value == "early")
            fusion_mode = FusionMode::Early;
        else if (value == "late")
            fusion_mode = FusionMode::Late;
        else
            throw ConfigError("fusion.mode: expected early or late, got '" + value + "'");
    } else if (key == "fusion.tune_fraction") {
        tune_fraction = parse_real(key, value);
    } else if (key == "io.cache_dir") {
        cache_dir = value;
    } else if (key == "io.out_dir") {
        out_dir = value;
    } else if (key == "run.jobs") {
        jobs = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "run.lenient") {
        lenient = parse_bool(key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void PipelineConfig::validate() const {
    try {
        stdn.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("normalize: ") + e.what());
    }
    if (clip_len < 2) throw ConfigError("motion.clip_len must be >= 2");
    if (flat_dim == 0 || map_size == 0 || channels == 0)
        throw ConfigError("features dims must be positive");
    if (pca_dim == 0 || pca_dim > channels)
        throw ConfigError("features.pca_dim must be in [1, channels]");
    if (vlad_k == 0) throw ConfigError("features.vlad_k must be positive");
    if (static_cast<std::uint64_t>(pca_dim) * vlad_k != vlad_dim)
        throw ConfigError("features.vlad_dim must equal pca_dim * vlad_k (" +
                          std::to_string(pca_dim) + " * " + std::to_string(vlad_k) + " = " +
                          std::to_string(static_cast<std::uint64_t>(pca_dim) * vlad_k) + ", got " +
                          std::to_string(vlad_dim) + ")");
    if (spp_levels.empty()) throw ConfigError("features.spp_levels must be non-empty");
    for (std::uint32_t g : spp_levels)
        if (g == 0 || g > map_size)
            throw ConfigError("features.spp_levels entries must be in [1, map_size]");
    if (stride == 0) throw ConfigError("features.stride must be positive");
    if (max_fit_descriptors == 0) throw ConfigError("features.max_fit_descriptors must be positive");
    if (!(svm_c > 0.0)) throw ConfigError("classify.svm_c must be positive");
    if (!(grid_step > 0.0) || grid_step > 1.0 ||
        std::fabs(std::lround(1.0 / grid_step) * grid_step - 1.0) > 1e-9)
        throw ConfigError("classify.grid_step must divide 1 exactly");
    if (!(tune_fraction > 0.0) || !(tune_fraction < 1.0))
        throw ConfigError("fusion.tune_fraction must lie in (0, 1)");
    if (jobs == 0) throw ConfigError("run.jobs must be positive");
}

std::string PipelineConfig::canonical_text() const {
    std::ostringstream ss;
    ss << "classify.grid_step=" << grid_step << '\n';
    ss << "classify.seed=" << seed << '\n';
    ss << "classify.svm_c=" << svm_c << '\n';
    ss << "features.channels=" << channels << '\n';
    ss << "features.extractor=" << extractor << '\n';
    ss << "features.flat_dim=" << flat_dim << '\n';
    ss << "features.map_size=" << map_size << '\n';
    ss << "features.max_fit_descriptors=" << max_fit_descriptors << '\n';
    ss << "features.paths=";
    switch (paths) {
        case PathSelect::Spatial: ss << "spatial"; break;
        case PathSelect::Temporal: ss << "temporal"; break;
        case PathSelect::Both: ss << "spatial,temporal"; break;
    }
    ss << '\n';
    ss << "features.pca_dim=" << pca_dim << '\n';
    ss << "features.spp_levels=";
    for (std::size_t i = 0; i < spp_levels.size(); ++i)
        ss << (i ? "," : "") << spp_levels[i];
    ss << '\n';
    ss << "features.stride=" << stride << '\n';
    ss << "features.vlad_dim=" << vlad_dim << '\n';
    ss << "features.vlad_k=" << vlad_k << '\n';
    ss << "features.whiten=" << (whiten ? "true" : "false") << '\n';
    ss << "fusion.mode=" << (fusion_mode == FusionMode::Early ? "early" : "late") << '\n';
    ss << "fusion.tune_fraction=" << tune_fraction << '\n';
    ss << "motion.clip_len=" << clip_len << '\n';
    ss << "normalize.bands=" << stdn.bands << '\n';
    ss << "normalize.mode=" << normalize_mode << '\n';
    ss << "normalize.percentile=" << stdn.percentile_p << '\n';
    ss << "normalize.window=" << stdn.window_n << '\n';
    ss << "run.jobs=" << jobs << '\n';
    ss << "run.lenient=" << (lenient ? "true" : "false") << '\n';
    return ss.str();
}

PipelineConfig default_config() {
    PipelineConfig cfg;
    if (const char* env = std::getenv("DEPTHPIPE_CACHE"); env && *env) cfg.cache_dir = env;
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    PipelineConfig cfg = default_config();
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError(where + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        try {
            cfg.apply(full, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

void apply_overrides(PipelineConfig& cfg, const std::vector<std::string>& overrides) {
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + item + "': expected key=value");
        cfg.apply(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
}

}  // namespace depthpipe

#include "qpt/io.hpp"

#include <cstring>
#include <fstream>

#include "qpt/errors.hpp"

namespace qpt {

namespace {
constexpr char b64_table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        std::uint32_t chunk = std::uint32_t(data[i]) << 16;
        if (i + 1 < len) chunk |= std::uint32_t(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= std::uint32_t(data[i + 2]);
        out += b64_table[(chunk >> 18) & 63];
        out += b64_table[(chunk >> 12) & 63];
        out += i + 1 < len ? b64_table[(chunk >> 6) & 63] : '=';
        out += i + 2 < len ? b64_table[chunk & 63] : '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t chunk = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n') continue;
        const int v = val(c);
        if (v < 0) throw ConfigError("base64: invalid character");
        chunk = (chunk << 6) | std::uint32_t(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(std::uint8_t((chunk >> bits) & 0xff));
        }
    }
    return out;
}

std::string encode_doubles(const std::vector<double>& v) {
    static_assert(sizeof(double) == 8);
    std::vector<std::uint8_t> bytes(v.size() * 8);
    std::memcpy(bytes.data(), v.data(), bytes.size());
    return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> decode_doubles(const std::string& text) {
    const std::vector<std::uint8_t> bytes = base64_decode(text);
    if (bytes.size() % 8 != 0) throw ConfigError("decode_doubles: byte count not a multiple of 8");
    std::vector<double> v(bytes.size() / 8);
    std::memcpy(v.data(), bytes.data(), bytes.size());
    return v;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Frame frame_from_name(const std::string& name) {
    if (name == "m1m2") return Frame::m1m2;
    if (name == "m1m3") return Frame::m1m3;
    throw ConfigError("unknown frame '" + name + "' (expected m1m2 or m1m3)");
}

Json torus_to_json(const TorusCircle& k, const BundleSet& b) {
    const std::size_t n = k.n();
    std::vector<double> kflat(n * 4), pflat(n * 16);
    for (std::size_t j = 0; j < n; ++j)
        for (int c = 0; c < 4; ++c) kflat[4 * j + c] = k.grid[j][c];
    for (std::size_t j = 0; j < n; ++j)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) pflat[16 * j + 4 * r + c] = b.p[j](r, c);

    Json j;
    j["type"] = "torus";
    j["frame"] = frame_name(k.frame);
    j["omega"] = k.omega;
    j["mu_p"] = k.mu_p;
    j["n_modes"] = n;
    j["resonance"] = {k.meta.res_m, k.meta.res_n};
    j["lineage"] = k.meta.lineage;
    j["lambda_s"] = b.lambda_s;
    j["lambda_u"] = b.lambda_u;
    j["grid_f64"] = encode_doubles(kflat);
    j["bundle_f64"] = encode_doubles(pflat);
    j["shear_f64"] = encode_doubles(b.shear);
    return j;
}

void torus_from_json(const Json& j, TorusCircle& k, BundleSet& b) {
    if (j.value("type", "") != "torus") throw ConfigError("not a torus file");
    k.frame = frame_from_name(j.at("frame").get<std::string>());
    k.omega = j.at("omega").get<double>();
    k.mu_p = j.at("mu_p").get<double>();
    const std::size_t n = j.at("n_modes").get<std::size_t>();
    const auto res = j.at("resonance");
    k.meta.res_m = res[0].get<int>();
    k.meta.res_n = res[1].get<int>();
    k.meta.lineage = j.value("lineage", "");
    b.lambda_s = j.at("lambda_s").get<double>();
    b.lambda_u = j.at("lambda_u").get<double>();

    const std::vector<double> kflat = decode_doubles(j.at("grid_f64").get<std::string>());
    const std::vector<double> pflat = decode_doubles(j.at("bundle_f64").get<std::string>());
    b.shear = decode_doubles(j.at("shear_f64").get<std::string>());
    if (kflat.size() != n * 4 || pflat.size() != n * 16 || b.shear.size() != n)
        throw ConfigError("torus file: array sizes inconsistent with n_modes");
    k.grid.resize(n);
    b.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 4; ++c) k.grid[i][c] = kflat[4 * i + c];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) b.p[i](r, c) = pflat[16 * i + 4 * r + c];
    }
}

Json report_to_json(const NewtonReport& rep) {
    return Json{{"residual_k", rep.residual_k},
                {"residual_p", rep.residual_p},
                {"iterations", rep.iterations},
                {"min_su_angle", rep.min_su_angle},
                {"min_divisor", rep.min_divisor},
                {"filtered", rep.filtered},
                {"eta2_average", rep.eta2_average},
                {"lambda_product_drift", rep.lambda_product_drift}};
}

NewtonReport report_from_json(const Json& j) {
    NewtonReport rep;
    rep.residual_k = j.at("residual_k").get<double>();
    rep.residual_p = j.at("residual_p").get<double>();
    rep.iterations = j.at("iterations").get<int>();
    rep.min_su_angle = j.at("min_su_angle").get<double>();
    rep.min_divisor = j.at("min_divisor").get<double>();
    rep.filtered = j.at("filtered").get<bool>();
    rep.eta2_average = j.at("eta2_average").get<double>();
    rep.lambda_product_drift = j.at("lambda_product_drift").get<double>();
    return rep;
}

Json orbit_to_json(const PeriodicOrbit& po) {
    Json j;
    j["type"] = "periodic_orbit";
    j["frame"] = frame_name(po.frame);
    j["state"] = {po.initial.x, po.initial.y, po.initial.px, po.initial.py};
    j["period"] = po.period;
    j["jacobi"] = po.jacobi;
    j["resonance"] = {po.m, po.n};
    j["mu"] = po.mu;
    j["lambda_u"] = po.lambda_u;
    j["lambda_s"] = po.lambda_s;
    j["residual"] = po.residual;
    std::vector<double> mono(16);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) mono[4 * r + c] = po.monodromy(r, c);
    j["monodromy_f64"] = encode_doubles(mono);
    return j;
}

PeriodicOrbit orbit_from_json(const Json& j) {
    if (j.value("type", "") != "periodic_orbit") throw ConfigError("not an orbit file");
    PeriodicOrbit po;
    po.frame = frame_from_name(j.at("frame").get<std::string>());
    const auto st = j.at("state");
    po.initial = State{st[0].get<double>(), st[1].get<double>(), st[2].get<double>(),
                       st[3].get<double>()};
    po.period = j.at("period").get<double>();
    po.jacobi = j.at("jacobi").get<double>();
    po.m = j.at("resonance")[0].get<int>();
    po.n = j.at("resonance")[1].get<int>();
    po.mu = j.at("mu").get<double>();
    po.lambda_u = j.at("lambda_u").get<double>();
    po.lambda_s = j.at("lambda_s").get<double>();
    po.residual = j.at("residual").get<double>();
    const std::vector<double> mono = decode_doubles(j.at("monodromy_f64").get<std::string>());
    if (mono.size() != 16) throw ConfigError("orbit file: bad monodromy block");
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) po.monodromy(r, c) = mono[4 * r + c];
    return po;
}

Json step_to_json(const StepEntry& e) {
    Json j;
    j["param"] = e.param;
    j["torus"] = torus_to_json(e.k, e.b);
    j["report"] = report_to_json(e.report);
    j["closest_own"] = e.closest_own;
    j["closest_pert"] = e.closest_pert;
    return j;
}

StepEntry step_from_json(const Json& j) {
    StepEntry e;
    e.param = j.at("param").get<double>();
    torus_from_json(j.at("torus"), e.k, e.b);
    e.report = report_from_json(j.at("report"));
    e.closest_own = j.at("closest_own").get<double>();
    e.closest_pert = j.at("closest_pert").get<double>();
    return e;
}

Json run_summary_json(const ContinuationRun& run) {
    Json gaps = Json::array();
    for (const auto& g : run.gaps)
        gaps.push_back(Json{{"lo", g.lo},
                            {"hi", g.hi},
                            {"nearest_rational", {g.p, g.q}},
                            {"min_divisor", g.min_divisor}});
    return Json{{"parameter", run.parameter},
                {"step", run.step},
                {"status", run_status_name(run.status)},
                {"message", run.message},
                {"gaps", gaps},
                {"steps", run.history.size()},
                {"max_modes_used", run.max_modes_used}};
}

}  // namespace qpt

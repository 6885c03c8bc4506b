#include "hisim/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hisim/errors.hpp"

namespace hisim {

using nlohmann::json;

namespace {

std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw DomainError(std::string("config: '") + what + "' must be a nonempty array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw DomainError(std::string("config: '") + what + "' must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

StaircaseData staircase(const json& j) {
    if (!j.is_object() || !j.contains("xs") || !j.contains("ys"))
        throw DomainError("config: a staircase needs 'xs' and 'ys'");
    StaircaseData s{numbers(j["xs"], "xs"), numbers(j["ys"], "ys")};
    if (s.xs.size() != s.ys.size()) throw DomainError("config: 'xs' and 'ys' must have equal length");
    return s;
}

Potential potential(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw DomainError("config: a potential needs a string 'type'");
    const std::string type = j["type"];
    if (type == "quadratic") {
        if (!j.contains("omega") || !j["omega"].is_number()) throw DomainError("config: quadratic needs 'omega'");
        return Potential::quadratic(j["omega"].get<double>());
    }
    if (type == "even_polynomial") {
        if (!j.contains("coeffs")) throw DomainError("config: even_polynomial needs 'coeffs'");
        return Potential::even_polynomial(numbers(j["coeffs"], "coeffs"));
    }
    if (type == "exp_glued") {
        if (!j.contains("m") || !j["m"].is_number_integer()) throw DomainError("config: exp_glued needs integer 'm'");
        return Potential::exp_glued(j["m"].get<int>());
    }
    throw DomainError("config: unknown potential type '" + type + "'");
}

}  // namespace

Config parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw DomainError("config: top level must be an object");
    Config c;
    if (doc.contains("symmetric")) {
        c.polygon = StarPolygon::symmetric(staircase(doc["symmetric"]));
    } else if (doc.contains("quadrants")) {
        const json& q = doc["quadrants"];
        if (!q.is_object()) throw DomainError("config: 'quadrants' must be an object");
        for (Quadrant quad : kQuadrants) {
            const std::string key(label(quad));
            if (!q.contains(key)) throw DomainError("config: missing quadrant '" + key + "'");
            c.polygon[quad] = staircase(q[key]);
        }
    } else {
        throw DomainError("config: needs 'quadrants' or 'symmetric'");
    }
    require_valid(c.polygon);
    if (doc.contains("V1")) c.V1 = potential(doc["V1"]);
    if (doc.contains("V2")) c.V2 = potential(doc["V2"]);
    c.has_potentials = doc.contains("V1") || doc.contains("V2");
    require_admissible(c.V1);
    require_admissible(c.V2);
    return c;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Config load_config(const std::string& path) { return parse_config(read_text(path)); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string heatmap_svg(const CellField& f, const std::string& title) {
    const int nx = static_cast<int>(f.rows()), ny = static_cast<int>(f.cols());
    const double size = 512.0, cw = size / nx, ch = size / ny, m = 40.0;
    const double lo = f.minCoeff(), hi = f.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size + 2 * m) << "\" height=\""
       << num(size + 2 * m) << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(m) << "\" y=\"" << num(m * 0.6) << "\" font-family=\"sans-serif\" font-size=\"14\">"
       << title << " (min " << num(lo) << ", max " << num(hi) << ")</text>\n<g shape-rendering=\"crispEdges\">\n";
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const int level = static_cast<int>(std::clamp((f(i, j) - lo) / span, 0.0, 1.0) * 255.0);
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", 255 - level / 2, 255 - level, 255 - level / 3);
            os << "<rect x=\"" << num(m + i * cw) << "\" y=\"" << num(m + size - (j + 1) * ch) << "\" width=\""
               << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\"/>\n";
        }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace hisim

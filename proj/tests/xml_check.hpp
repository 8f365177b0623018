#pragma once

// Minimal well-formedness check for the generated SVG and HTML: tags nest and
// close, and (for SVG) numeric attributes are finite numbers.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

namespace driveml::fixture {

struct XmlCheck {
    bool ok = true;
    std::string error;
    std::size_t roots = 0;
};

inline XmlCheck check_markup(const std::string& doc, const std::set<std::string>& void_tags = {}) {
    XmlCheck r;
    std::vector<std::string> stack;
    static const std::set<std::string> numeric{"x", "y", "x1", "y1", "x2", "y2", "cx", "cy", "r", "width", "height"};
    std::size_t i = 0;
    auto fail = [&](std::string why) {
        r.ok = false;
        r.error = std::move(why);
        return r;
    };
    while ((i = doc.find('<', i)) != std::string::npos) {
        if (doc.compare(i, 2, "<!") == 0 || doc.compare(i, 2, "<?") == 0) {
            i = doc.find('>', i);
            if (i == std::string::npos) return fail("unterminated declaration");
            continue;
        }
        const auto end = doc.find('>', i);
        if (end == std::string::npos) return fail("unterminated tag");
        std::string tag = doc.substr(i + 1, end - i - 1);
        i = end + 1;
        if (!tag.empty() && tag[0] == '/') {
            const auto name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return fail("mismatched </" + name + ">");
            stack.pop_back();
            continue;
        }
        const bool self_closing = !tag.empty() && tag.back() == '/';
        std::size_t k = 0;
        while (k < tag.size() && !std::isspace(static_cast<unsigned char>(tag[k])) && tag[k] != '/') ++k;
        const auto name = tag.substr(0, k);
        // Attributes: name="value"
        while (true) {
            const auto eq = tag.find("=\"", k);
            if (eq == std::string::npos) break;
            auto a = eq;
            while (a > 0 && !std::isspace(static_cast<unsigned char>(tag[a - 1]))) --a;
            const auto attr = tag.substr(a, eq - a);
            const auto close = tag.find('"', eq + 2);
            if (close == std::string::npos) return fail("unterminated attribute in <" + name + ">");
            const auto value = tag.substr(eq + 2, close - eq - 2);
            if (numeric.count(attr) && name != "html") {
                char* stop = nullptr;
                const double v = std::strtod(value.c_str(), &stop);
                if (stop == value.c_str() || *stop != '\0' || !std::isfinite(v)) {
                    return fail("non-numeric " + attr + "=\"" + value + "\" in <" + name + ">");
                }
            }
            k = close + 1;
        }
        if (stack.empty()) ++r.roots;
        if (!self_closing && !void_tags.count(name)) stack.push_back(name);
    }
    if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
    return r;
}

/// Every inline <svg>...</svg> fragment of a document.
inline std::vector<std::string> svg_fragments(const std::string& html) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while ((i = html.find("<svg", i)) != std::string::npos) {
        const auto end = html.find("</svg>", i);
        if (end == std::string::npos) break;
        out.push_back(html.substr(i, end + 6 - i));
        i = end + 6;
    }
    return out;
}

}  // namespace driveml::fixture

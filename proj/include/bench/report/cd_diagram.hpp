#ifndef BENCH_REPORT_CD_DIAGRAM_HPP
#define BENCH_REPORT_CD_DIAGRAM_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"

namespace bench {

struct Clique {
    std::vector<std::size_t> members;  // indices into the rank-sorted order
    double min_rank = 0.0;
    double max_rank = 0.0;
};

/// Maximal runs of rank-sorted strategies whose rank span stays strictly below cd.
/// `sorted_ranks` must be ascending.
inline std::vector<Clique> cd_cliques(std::span<const double> sorted_ranks, double cd) {
    std::vector<Clique> out;
    const std::size_t k = sorted_ranks.size();
    std::size_t prev_end = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i;
        while (j + 1 < k && sorted_ranks[j + 1] - sorted_ranks[i] < cd) ++j;
        if (j == i || (have_prev && j <= prev_end)) continue;
        Clique c;
        for (std::size_t m = i; m <= j; ++m) c.members.push_back(m);
        c.min_rank = sorted_ranks[i];
        c.max_rank = sorted_ranks[j];
        out.push_back(std::move(c));
        prev_end = j;
        have_prev = true;
    }
    return out;
}

namespace detail {
inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}
inline std::string num(double v) { return format_fixed(v, 2); }
} // namespace detail

/// Critical-difference diagram as SVG 1.1. The axis runs from rank 1 (left) to
/// rank K (right); strategies are placed at their average ranks, the better half
/// labelled on the left and the rest on the right, and each maximal clique of
/// strategies whose rank span is below `cd` is joined by a bar.
///
/// A <metadata> element carries the placement and cliques as JSON. `top`, when
/// non-zero, keeps only the `top` best-ranked strategies; the axis still spans [1, K].
inline std::string cd_diagram_svg(std::span<const double> avg_ranks,
                                  std::span<const std::string> labels, double cd,
                                  std::size_t top = 0) {
    if (avg_ranks.size() != labels.size())
        throw Error(Errc::LengthMismatch, "one label per strategy required");
    const std::size_t k_axis = avg_ranks.size();
    if (k_axis < 2) throw Error(Errc::EmptyInput, "a CD diagram needs at least 2 strategies");
    if (!(cd > 0.0)) throw Error(Errc::DomainError, "critical difference must be positive");

    std::vector<std::size_t> order(k_axis);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return avg_ranks[a] < avg_ranks[b] || (avg_ranks[a] == avg_ranks[b] && labels[a] < labels[b]);
    });
    if (top > 0 && top < order.size()) order.resize(top);
    const std::size_t k = order.size();
    std::vector<double> sorted;
    for (auto i : order) sorted.push_back(avg_ranks[i]);
    const auto cliques = cd_cliques(sorted, cd);

    const double width = 800.0, left = 160.0, right = 640.0, axis_y = 80.0;
    const double row_h = 22.0;
    const std::size_t left_count = (k + 1) / 2;
    const double bars_top = axis_y + 18.0;
    const double labels_top = bars_top + 10.0 * static_cast<double>(cliques.size()) + 20.0;
    const double height = labels_top + row_h * static_cast<double>(std::max(left_count, k - left_count)) + 20.0;
    auto x_of = [&](double rank) {
        return left + (rank - 1.0) / static_cast<double>(k_axis - 1) * (right - left);
    };

    nlohmann::ordered_json meta;
    meta["cd"] = cd;
    meta["axis"] = {1, k_axis};
    auto strategies = nlohmann::ordered_json::array();
    for (auto i : order) strategies.push_back({{"label", labels[i]}, {"avg_rank", avg_ranks[i]}});
    meta["strategies"] = std::move(strategies);
    auto cl = nlohmann::ordered_json::array();
    for (const auto& c : cliques) {
        std::vector<std::string> names;
        for (auto m : c.members) names.push_back(labels[order[m]]);
        cl.push_back({{"members", names}, {"min_rank", c.min_rank}, {"max_rank", c.max_rank}});
    }
    meta["cliques"] = std::move(cl);

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + detail::num(width) +
         "\" height=\"" + detail::num(height) + "\" viewBox=\"0 0 " + detail::num(width) + " " +
         detail::num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<metadata id=\"cd-diagram\">" + detail::xml_escape(meta.dump()) + "</metadata>\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // CD scale bar
    s += "<g class=\"cd-scale\">\n";
    s += "<line x1=\"" + detail::num(left) + "\" y1=\"20.00\" x2=\"" + detail::num(x_of(1.0 + cd)) +
         "\" y2=\"20.00\" stroke=\"black\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + detail::num(left) + "\" y=\"14.00\">CD = " + format_fixed(cd, 3) + "</text>\n";
    s += "</g>\n";

    // Axis with integer ticks
    s += "<g class=\"axis\">\n";
    s += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(axis_y) + "\" x2=\"" +
         detail::num(right) + "\" y2=\"" + detail::num(axis_y) + "\" stroke=\"black\"/>\n";
    for (std::size_t t = 1; t <= k_axis; ++t) {
        const double x = x_of(static_cast<double>(t));
        s += "<line x1=\"" + detail::num(x) + "\" y1=\"" + detail::num(axis_y - 6) + "\" x2=\"" +
             detail::num(x) + "\" y2=\"" + detail::num(axis_y) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + detail::num(x) + "\" y=\"" + detail::num(axis_y - 10) +
             "\" text-anchor=\"middle\">" + std::to_string(t) + "</text>\n";
    }
    s += "</g>\n";

    s += "<g class=\"strategies\">\n";
    for (std::size_t pos = 0; pos < k; ++pos) {
        const auto i = order[pos];
        const bool on_left = pos < left_count;
        const std::size_t row = on_left ? pos : k - 1 - pos;
        const double x = x_of(avg_ranks[i]);
        const double y = labels_top + row_h * static_cast<double>(row);
        const double label_x = on_left ? left - 20.0 : right + 20.0;
        s += "<g class=\"strategy\" data-label=\"" + detail::xml_escape(labels[i]) +
             "\" data-rank=\"" + format_real(avg_ranks[i]) + "\">\n";
        s += "<polyline points=\"" + detail::num(x) + "," + detail::num(axis_y) + " " +
             detail::num(x) + "," + detail::num(y) + " " + detail::num(label_x) + "," +
             detail::num(y) + "\" fill=\"none\" stroke=\"black\"/>\n";
        s += "<text x=\"" + detail::num(on_left ? label_x - 4 : label_x + 4) + "\" y=\"" +
             detail::num(y + 4) + "\" text-anchor=\"" + (on_left ? "end" : "start") + "\">" +
             detail::xml_escape(labels[i]) + " (" + format_fixed(avg_ranks[i], 2) + ")</text>\n";
        s += "</g>\n";
    }
    s += "</g>\n";

    s += "<g class=\"cliques\">\n";
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        const double y = bars_top + 10.0 * static_cast<double>(c);
        s += "<line class=\"clique\" x1=\"" + detail::num(x_of(cliques[c].min_rank) - 3) + "\" y1=\"" +
             detail::num(y) + "\" x2=\"" + detail::num(x_of(cliques[c].max_rank) + 3) + "\" y2=\"" +
             detail::num(y) + "\" stroke=\"black\" stroke-width=\"4\"/>\n";
    }
    s += "</g>\n";
    s += "</svg>\n";
    return s;
}

/// JSON placed in the diagram's <metadata> element.
inline nlohmann::json cd_diagram_metadata(std::string_view svg) {
    const std::string open = "<metadata id=\"cd-diagram\">";
    const auto b = svg.find(open);
    const auto e = svg.find("</metadata>");
    if (b == std::string_view::npos || e == std::string_view::npos)
        throw Error(Errc::ParseError, "no cd-diagram metadata");
    std::string text(svg.substr(b + open.size(), e - b - open.size()));
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out.push_back(text[i]);
            continue;
        }
        const auto semi = text.find(';', i);
        const auto ent = text.substr(i, semi - i + 1);
        out += ent == "&amp;" ? "&" : ent == "&lt;" ? "<" : ent == "&gt;" ? ">" : "\"";
        i = semi;
    }
    return nlohmann::json::parse(out);
}

} // namespace bench

#endif // BENCH_REPORT_CD_DIAGRAM_HPP

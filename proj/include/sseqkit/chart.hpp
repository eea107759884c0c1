#pragma once

// ASCII and SVG renderings of a page in Adams indexing.

#include <sstream>
#include <string>

#include "sseqkit/sseq.hpp"

namespace sseqkit {

/// One character per (stem, filtration): '.' for zero, the dimension, or '*' above 9.
/// Highest filtration first; stems increase left to right.
inline std::string render_ascii(const ChainPage& page, const BidegreeWindow& w, const std::string& title = "")
{
    std::ostringstream out;
    out << (title.empty() ? "E_" + std::to_string(page.r) : title) << "  stems " << w.stem_min << ".." << w.stem_max
        << "\n";
    for (int y = w.filtration_max; y >= 0; --y) {
        std::string label = std::to_string(y);
        out << std::string(label.size() < 4 ? 4 - label.size() : 0, ' ') << label << " |";
        for (int x = w.stem_min; x <= w.stem_max; ++x) {
            std::size_t n = page.dim({x, y});
            out << (n == 0 ? '.' : n > 9 ? '*' : static_cast<char>('0' + n));
        }
        out << "\n";
    }
    out << "     +" << std::string(static_cast<std::size_t>(w.stem_max - w.stem_min + 1), '-') << "\n";
    return out.str();
}

/// SVG 1.1 chart on a 24-unit grid with one dot per class and d_r arrows.
inline std::string render_svg(const ChainPage& page, const BidegreeWindow& w, const std::string& title = "")
{
    constexpr int cell = 24;
    const int cols = w.stem_max - w.stem_min + 1, rows = w.filtration_max + 1;
    const int width = (cols + 2) * cell, height = (rows + 2) * cell;
    auto px = [&](int stem) { return (stem - w.stem_min + 1) * cell + cell / 2; };
    auto py = [&](int filt) { return (w.filtration_max - filt + 1) * cell + cell / 2; };
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<title>" << (title.empty() ? "E_" + std::to_string(page.r) : title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
      << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (int x = w.stem_min; x <= w.stem_max; ++x)
        s << "<line x1=\"" << px(x) << "\" y1=\"" << py(w.filtration_max) << "\" x2=\"" << px(x) << "\" y2=\"" << py(0)
          << "\"/>\n";
    for (int y = 0; y <= w.filtration_max; ++y)
        s << "<line x1=\"" << px(w.stem_min) << "\" y1=\"" << py(y) << "\" x2=\"" << px(w.stem_max) << "\" y2=\"" << py(y)
          << "\"/>\n";
    s << "</g>\n<g font-family=\"monospace\" font-size=\"9\" fill=\"#555555\" text-anchor=\"middle\">\n";
    for (int x = w.stem_min; x <= w.stem_max; ++x)
        if (x % 4 == 0)
            s << "<text x=\"" << px(x) << "\" y=\"" << py(0) + cell << "\">" << x << "</text>\n";
    for (int y = 0; y <= w.filtration_max; ++y)
        if (y % 2 == 0)
            s << "<text x=\"" << px(w.stem_min) - cell << "\" y=\"" << py(y) + 3 << "\">" << y << "</text>\n";
    s << "</g>\n<g stroke=\"#1f4e9c\" stroke-width=\"1.5\">\n";
    for (const auto& [b, m] : page.d) {
        if (rank(m) == 0)
            continue;
        Bidegree t = b + differential_shift(page.r);
        s << "<line x1=\"" << px(b.stem) << "\" y1=\"" << py(b.filtration) << "\" x2=\"" << px(t.stem) << "\" y2=\""
          << py(t.filtration) << "\"/>\n";
    }
    s << "</g>\n<g fill=\"black\">\n";
    for (const auto& [b, n] : page.dims) {
        if (!w.contains(b))
            continue;
        s << "<circle cx=\"" << px(b.stem) << "\" cy=\"" << py(b.filtration) << "\" r=\"4\"/>\n";
        if (n > 1)
            s << "<text x=\"" << px(b.stem) + 6 << "\" y=\"" << py(b.filtration) - 5
              << "\" font-family=\"monospace\" font-size=\"8\">" << n << "</text>\n";
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

}  // namespace sseqkit

#pragma once

// Commands behind the sseqkit executable. Each returns its JSON document and
// exit code (0 success, 1 error, 2 edge-uncertain) so it can run in process.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sseqkit/chart.hpp"
#include "sseqkit/eon.hpp"
#include "sseqkit/picard.hpp"

namespace sseqkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitEdgeUncertain = 2;

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json output;
    std::vector<std::string> files;
};

inline CommandResult failure(const std::string& message, nlohmann::json extra = nlohmann::json::object())
{
    extra["error"] = message;
    return {kExitError, extra, {}};
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',')
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

/// "3" is an integer; "1:2" gives coordinates (constant term first).
inline GfElement parse_unit(const GaloisField& F, const std::string& text)
{
    auto parts = split_list(text, ':');
    if (parts.empty())
        throw Error("empty unit");
    if (parts.size() == 1)
        return GfElement::from_int(F, std::stoll(parts[0]));
    if (parts.size() != F.degree())
        throw Error("unit '" + text + "' needs " + std::to_string(F.degree()) + " coordinates");
    std::vector<std::uint32_t> coords;
    for (const auto& c : parts) {
        long long v = std::stoll(c);
        if (v < 0 || v >= static_cast<long long>(F.characteristic()))
            throw Error("unit coordinate " + c + " out of range");
        coords.push_back(static_cast<std::uint32_t>(v));
    }
    return GfElement::from_coords(F, coords);
}

inline std::filesystem::path output_dir(const std::string& explicit_dir)
{
    if (!explicit_dir.empty())
        return explicit_dir;
    if (const char* env = std::getenv("SSEQKIT_OUT_DIR"); env && *env)
        return env;
    return ".";
}

struct EonOptions {
    std::uint32_t p = 3;
    std::uint32_t n = 1;
    std::vector<std::string> a_units;  // one per i, or a single value for all
    std::vector<std::string> b_units;
    std::optional<int> stem_min, stem_max, filtration_max;
    std::string format = "svg";  // svg, ascii, both, none
    bool paper_literal_bidegrees = false;
    std::string out_dir;
};

inline std::vector<GfElement> parse_units(const GaloisField& F, const std::vector<std::string>& texts, std::uint32_t n,
                                          const char* which)
{
    if (texts.empty())
        return std::vector<GfElement>(n, GfElement(F, 1));
    if (texts.size() != 1 && texts.size() != n)
        throw Error(std::string("expected 1 or n = ") + std::to_string(n) + " values for " + which);
    std::vector<GfElement> out;
    for (std::uint32_t i = 0; i < n; ++i)
        out.push_back(parse_unit(F, texts[texts.size() == 1 ? 0 : i]));
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path.string());
    f << content;
}

inline CommandResult cmd_eon(const EonOptions& opt)
{
    try {
        if (opt.n == 0)
            throw Error("n must be >= 1");
        EonModelParams params = EonModelParams::defaults(opt.p, opt.n);
        params.paper_literal_bidegrees = opt.paper_literal_bidegrees;
        params.a_units = parse_units(params.field(), opt.a_units, opt.n, "a_units");
        params.b_units = parse_units(params.field(), opt.b_units, opt.n, "b_units");
        params.validate();
        try {
            build_e2(params);
        } catch (const BidegreeError& e) {
            return failure(e.what(), {{"bidegree_failures", e.failures()}});
        }

        ShiftCertificate cert = sw_shift(params);
        BidegreeWindow w = eon_window(params, cert.N);
        if (opt.stem_min)
            w.stem_min = *opt.stem_min;
        if (opt.stem_max)
            w.stem_max = *opt.stem_max;
        if (opt.filtration_max)
            w.filtration_max = *opt.filtration_max;
        ShiftVerdict verdict = verify_shift(params, cert, w);

        CommandResult res;
        const auto dir = output_dir(opt.out_dir);
        const std::string stem = "eon_p" + std::to_string(opt.p) + "_n" + std::to_string(opt.n);
        if (opt.format != "none") {
            if (opt.format != "svg" && opt.format != "ascii" && opt.format != "both")
                throw Error("unknown format " + opt.format);
            std::filesystem::create_directories(dir);
            EonModelParams chart_params = params;
            chart_params.window = w;
            SseqRun run(build_e2(chart_params));
            // pages between rule pages coincide; write each rule page and E_infinity
            std::vector<int> pages = run.sseq().rule_pages();
            pages.push_back(run.sseq().r_max() + 1);
            nlohmann::json chart_pages = nlohmann::json::array();
            for (int r : pages) {
                const bool inf = r > run.sseq().r_max();
                ChainPage pg = run.page(r);
                const std::string name = stem + "_E" + (inf ? std::string("inf") : std::to_string(r));
                const std::string title = inf ? "E_infinity" : "E_" + std::to_string(r);
                chart_pages.push_back(SseqRun::page_json(pg, inf));
                if (opt.format == "svg" || opt.format == "both") {
                    write_file(dir / (name + ".svg"), render_svg(pg, w, title));
                    res.files.push_back((dir / (name + ".svg")).string());
                }
                if (opt.format == "ascii" || opt.format == "both") {
                    write_file(dir / (name + ".txt"), render_ascii(pg, w, title));
                    res.files.push_back((dir / (name + ".txt")).string());
                }
            }
            write_file(dir / (stem + "_chart.json"), nlohmann::json{{"pages", chart_pages}}.dump(2) + "\n");
            res.files.push_back((dir / (stem + "_chart.json")).string());
        }

        const auto cert_path = dir / (stem + "_certificate.json");
        if (opt.format != "none")
            res.files.push_back(cert_path.string());
        nlohmann::json units_a = nlohmann::json::array(), units_b = nlohmann::json::array();
        for (std::uint32_t i = 0; i < opt.n; ++i) {
            units_a.push_back(params.a_units[i].to_string());
            units_b.push_back(params.b_units[i].to_string());
        }
        res.output = {{"command", "eon"},
                      {"field", {{"p", opt.p}, {"n", opt.n}, {"poly", params.field().modulus()}}},
                      {"a_units", units_a},
                      {"b_units", units_b},
                      {"certificate", cert.to_json()},
                      {"verification", verdict.to_json()},
                      {"files", res.files}};
        if (opt.format != "none")
            write_file(cert_path, res.output.dump(2) + "\n");
        res.exit_code = verdict.verdict.status == Permanence::permanent        ? kExitOk
                        : verdict.verdict.status == Permanence::edge_uncertain ? kExitEdgeUncertain
                                                                                 : kExitError;
        return res;
    } catch (const std::exception& e) {
        return failure(e.what());
    }
}

struct PicardOptions {
    std::uint64_t p = 3;
    int t_max = 20;
    std::string resolution = "nonsplit_HMS";
};

inline CommandResult cmd_picard(const PicardOptions& opt)
{
    try {
        if (opt.p == 2)
            return failure("p = 2 is out of scope: the K(1)-local Picard group at p = 2 needs a different "
                           "construction; only odd primes are supported");
        auto resolution = extension_resolution_from_string(opt.resolution);
        PicE2Table table = pic_e2(opt.p, opt.t_max);
        CollapseResult collapse = collapse_check(table);
        PicardGroupResult result = assemble_pi0(table, resolution);
        return {kExitOk,
                {{"command", "picard"},
                 {"p", opt.p},
                 {"e2", table.to_json()},
                 {"collapse", collapse.to_json()},
                 {"result", result.to_json()}},
                {}};
    } catch (const std::exception& e) {
        return failure(e.what());
    }
}

struct SphereOptions {
    std::uint64_t p = 3;
    std::string digits = "1";
    std::optional<std::size_t> depth;
};

inline CommandResult cmd_sphere(const SphereOptions& opt)
{
    try {
        std::vector<std::uint64_t> ds;
        for (const auto& d : split_list(opt.digits)) {
            if (d.find_first_not_of("0123456789") != std::string::npos)
                throw Error("bad digit '" + d + "'");
            ds.push_back(std::stoull(d));
        }
        if (ds.empty())
            throw Error("no digits given");
        PAdicDigitStream a(opt.p, ds);
        const std::size_t depth = opt.depth.value_or(ds.size());
        MooreDiagram diagram = build_diagram(a, depth);
        const std::size_t dim = k1_dimension(diagram);
        std::vector<std::int64_t> truncations;
        for (std::size_t k = 0; k < depth; ++k)
            truncations.push_back(a.truncation(k));
        return {dim == 1 ? kExitOk : kExitError,
                {{"command", "sphere"},
                 {"p", opt.p},
                 {"digits", ds},
                 {"depth", depth},
                 {"truncations", truncations},
                 {"diagram", diagram.to_json()},
                 {"k1_dimension", dim}},
                {}};
    } catch (const std::exception& e) {
        return failure(e.what());
    }
}

}  // namespace sseqkit::cli

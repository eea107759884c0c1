#include <iostream>

#include <CLI11.hpp>

#include "sseqkit/cli.hpp"

int main(int argc, char** argv)
{
    using namespace sseqkit::cli;
    CLI::App app{"sseqkit: spectral sequence computations"};
    app.require_subcommand(1);

    EonOptions eon;
    std::string a_units, b_units;
    auto* eon_cmd = app.add_subcommand("eon", "HFPSS model for E_{n(p-1)}^{hC_p} and its shift certificate");
    eon_cmd->add_option("--p", eon.p, "odd prime")->default_val(3);
    eon_cmd->add_option("--n", eon.n, "height parameter n >= 1")->default_val(1);
    eon_cmd->add_option("--a-units", a_units, "comma-separated units a_i (integers or c0:c1:... coordinates)");
    eon_cmd->add_option("--b-units", b_units, "comma-separated units b_i");
    eon_cmd->add_option("--stem-min", eon.stem_min, "chart window");
    eon_cmd->add_option("--stem-max", eon.stem_max);
    eon_cmd->add_option("--filtration-max", eon.filtration_max);
    eon_cmd->add_option("--format", eon.format, "svg, ascii, both or none")->default_val("svg");
    eon_cmd->add_flag("--paper-literal-bidegrees", eon.paper_literal_bidegrees, "use |beta| = (-2,0)");
    eon_cmd->add_option("--out-dir", eon.out_dir, "output directory (default: $SSEQKIT_OUT_DIR or .)");

    PicardOptions pic;
    auto* pic_cmd = app.add_subcommand("picard", "K(1)-local Picard group at an odd prime");
    pic_cmd->add_option("--p", pic.p)->default_val(3);
    pic_cmd->add_option("--t-max", pic.t_max)->default_val(20);
    pic_cmd->add_option("--resolution", pic.resolution, "nonsplit, split or unresolved")->default_val("nonsplit_HMS");

    SphereOptions sphere;
    std::size_t depth = 0;
    auto* sphere_cmd = app.add_subcommand("sphere", "p-adic sphere as a colimit of Moore spectra");
    sphere_cmd->add_option("--p", sphere.p)->default_val(3);
    sphere_cmd->add_option("--digits", sphere.digits, "comma-separated p-adic digits, lowest first")->default_val("1");
    auto* depth_opt = sphere_cmd->add_option("--depth", depth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }

    CommandResult res;
    if (*eon_cmd) {
        eon.a_units = split_list(a_units);
        eon.b_units = split_list(b_units);
        res = cmd_eon(eon);
    } else if (*pic_cmd) {
        res = cmd_picard(pic);
    } else {
        if (depth_opt->count())
            sphere.depth = depth;
        res = cmd_sphere(sphere);
    }
    std::cout << res.output.dump(2) << "\n";
    if (res.output.contains("error"))
        std::cerr << "error: " << res.output["error"].get<std::string>() << "\n";
    return res.exit_code;
}

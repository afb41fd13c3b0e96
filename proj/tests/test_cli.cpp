#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = POLYUNIQ_CLI;
const std::string kData = POLYUNIQ_DATA;

struct CliRun
{
    int code = -1;
    std::string out;
};

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / "polyuniq_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

CliRun run(const std::string& args, const std::string& env = "")
{
    static int counter = 0;
    fs::path out = scratch("stdout_" + std::to_string(counter++) + ".txt");
    std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli + "\" " + args + " > \"" + out.string() + "\" 2> /dev/null";
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

std::string data(const std::string& name) { return "\"" + kData + "/" + name + "\""; }

std::vector<std::pair<double, double>> polygon_points(const std::string& attr)
{
    std::vector<std::pair<double, double>> pts;
    std::istringstream in(attr);
    std::string tok;
    while (in >> tok) {
        auto comma = tok.find(',');
        pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    return pts;
}

// Parses the SVG as XML and checks every coordinate attribute against the viewBox.
boost::property_tree::ptree check_svg(const std::string& text, std::size_t& polygons, std::size_t& first_polygon_size)
{
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    boost::property_tree::read_xml(in, tree);
    const auto& svg = tree.get_child("svg");
    EXPECT_EQ(svg.get<std::string>("<xmlattr>.viewBox"), "0 0 400 400");
    polygons = 0;
    first_polygon_size = 0;
    auto in_box = [](double v) { return v >= 0.0 && v <= 400.0; };
    for (const auto& [tag, node] : svg) {
        if (tag == "polygon") {
            auto pts = polygon_points(node.get<std::string>("<xmlattr>.points"));
            if (polygons++ == 0) first_polygon_size = pts.size();
            for (auto [x, y] : pts) {
                EXPECT_TRUE(in_box(x));
                EXPECT_TRUE(in_box(y));
            }
        }
        for (const char* key : {"x1", "y1", "x2", "y2", "cx", "cy", "x", "y"}) {
            auto v = node.get_optional<double>(std::string("<xmlattr>.") + key);
            if (v) EXPECT_TRUE(in_box(*v)) << tag << " " << key << "=" << *v;
        }
    }
    return tree;
}

} // namespace

TEST(Cli, UniquenessExitCodes)
{
    CliRun a = run("uniqueness --matrix " + data("sup_vertex.csv") + " --norm sup");
    EXPECT_EQ(a.code, 1);
    json j = json::parse(a.out);
    EXPECT_EQ(j["command"], "uniqueness");
    EXPECT_FALSE(j["result"]["unique_for_all_y"].get<bool>());
    EXPECT_EQ(j["result"]["offending_face"]["codim"], 2);
    EXPECT_EQ(j["result"]["offending_face"]["vertices"], json::parse(R"([["1","0"]])"));
    EXPECT_EQ(j["inputs"]["matrix"], json::parse(R"([["1","0"]])"));

    EXPECT_EQ(run("uniqueness --matrix " + data("sup_unique.csv") + " --norm sup").code, 0);
    EXPECT_EQ(run("uniqueness --matrix " + data("bp_unique.csv") + " --mode bp").code, 0);
    EXPECT_EQ(run("uniqueness --matrix " + data("bp_segment.csv") + " --mode bp").code, 1);
    EXPECT_EQ(run("uniqueness --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5").code, 0);
}

TEST(Cli, ErrorsExitTwo)
{
    fs::path bad = scratch("malformed.csv");
    std::ofstream(bad) << "1,2\n3\n";
    EXPECT_EQ(run("uniqueness --matrix \"" + bad.string() + "\" --norm sup").code, 2);
    EXPECT_EQ(run("uniqueness --matrix /nonexistent/x.csv --norm sup").code, 2);
    EXPECT_EQ(run("uniqueness --matrix " + data("slope3.csv") + " --norm slope --weights 1,2,3").code, 2);
    EXPECT_EQ(run("uniqueness --norm sup").code, 2);
    EXPECT_EQ(run("bogus").code, 2);

    fs::path wide = scratch("wide.csv");
    std::ofstream(wide) << "1,2,3,4,5,6,7,8,9,10,11\n";
    EXPECT_EQ(run("accessible --matrix \"" + wide.string() + "\" --norm l1").code, 2);
    EXPECT_EQ(run("accessible --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5 --cap 2").code, 2);
    EXPECT_EQ(run("accessible --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5", "POLYUNIQ_SLOPE_CAP=2").code, 2);

    EXPECT_EQ(run("solve --matrix " + data("bp_segment.csv") + " --mode bp --response 1,2").code, 2);
    EXPECT_EQ(run("plot --kind dual --matrix " + data("slope3.csv") + " --norm l1").code, 2);
}

TEST(Cli, AccessibleCounts)
{
    CliRun a = run("accessible --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5");
    ASSERT_EQ(a.code, 0);
    json j = json::parse(a.out);
    EXPECT_EQ(j["result"]["accessible_count"], 17);
    EXPECT_EQ(j["result"]["pattern_count"], 147);
    for (const auto& item : j["result"]["patterns"]) {
        EXPECT_EQ(item["geometric"], item["accessible"]);
        EXPECT_EQ(item["analytic"], item["accessible"]);
        if (item["pattern"] == json::parse("[2,1,0]")) EXPECT_FALSE(item["accessible"].get<bool>());
    }

    CliRun b = run("accessible --matrix " + data("identity2.csv") + " --norm l1");
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(json::parse(b.out)["result"]["accessible_count"], 9);
}

TEST(Cli, SolveAndDecompose)
{
    CliRun small = run("decompose --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5 --response 0.1,0.05");
    ASSERT_EQ(small.code, 0);
    json s = json::parse(small.out);
    EXPECT_EQ(s["result"]["model"], json::parse("[0,0,0]"));
    EXPECT_EQ(s["result"]["residual"], json::parse(R"(["1/10","1/20"])"));

    CliRun bp = run("solve --matrix " + data("bp_unique.csv") + " --mode bp --response 1");
    ASSERT_EQ(bp.code, 0);
    json bj = json::parse(bp.out);
    EXPECT_EQ(bj["result"]["point"], json::parse(R"(["0","1/2"])"));
    EXPECT_EQ(bj["result"]["l1_value"], "1/2");

    CliRun sup = run("solve --matrix " + data("sup_vertex.csv") + " --norm sup --response 2");
    ASSERT_EQ(sup.code, 0);
    EXPECT_TRUE(json::parse(sup.out)["result"]["certified"].get<bool>());

    CliRun capped = run("solve --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5 --response 40,-3 --max-iter 0");
    EXPECT_EQ(capped.code, 2);
}

TEST(Cli, ModelRegionResponseClassifies)
{
    CliRun acc = run("accessible --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5");
    json aj = json::parse(acc.out);
    for (const auto& item : aj["result"]["patterns"]) {
        if (item["pattern"] != json::parse("[1,1,1]")) continue;
        // y = z + X m with z the geometric witness.
        const auto& z = item["geometric_witness"];
        CliRun r = run("decompose --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5 --response=\"" +
                    item["response_witness"][0].get<std::string>() + "," + item["response_witness"][1].get<std::string>() + "\"");
        ASSERT_EQ(r.code, 0);
        json j = json::parse(r.out);
        EXPECT_EQ(j["result"]["model"], json::parse("[1,1,1]"));
        EXPECT_FALSE(j["result"]["ambiguous"].get<bool>());
        EXPECT_EQ(z.size(), 2u);
    }
}

TEST(Cli, ReportsAreByteIdentical)
{
    const std::string args = " --matrix " + data("slope3.csv") + " --norm slope --weights 5.5,3.5,1.5";
    EXPECT_EQ(run("accessible" + args).out, run("accessible" + args).out);
    EXPECT_EQ(run("uniqueness" + args).out, run("uniqueness" + args).out);
    const std::string gen = "genericity --dim 3 --rows 2 --trials 5 --seed 11 --norm l1";
    CliRun a = run(gen), b = run(gen);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(json::parse(a.out)["result"]["fraction"], 1.0);
    EXPECT_NE(a.out, run("genericity --dim 3 --rows 2 --trials 5 --seed 12 --norm l1").out);
    CliRun csv = run(gen + " --format csv");
    EXPECT_EQ(csv.code, 0);
    EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 6);

    fs::path out = scratch("report.json");
    EXPECT_EQ(run("uniqueness" + args + " --out \"" + out.string() + "\"").code, 0);
    EXPECT_EQ(slurp(out), run("uniqueness" + args).out);
}

TEST(Cli, ModelsCommand)
{
    CliRun a = run("models --dim 2");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(json::parse(a.out)["result"]["count"], 17);
    CliRun b = run("models --weights 3.5,1.5");
    ASSERT_EQ(b.code, 0);
    json j = json::parse(b.out);
    for (const auto& item : j["result"]["models"]) EXPECT_EQ(item["face"]["codim"], item["level"]);
    EXPECT_EQ(run("models --dim 3").out.empty(), false);
    EXPECT_EQ(run("models --dim 7").code, 2);
}

TEST(Cli, ConfigFile)
{
    fs::path cfg = scratch("run.ini");
    std::ofstream(cfg) << "[uniqueness]\nmatrix=" << kData << "/sup_vertex.csv\nnorm=sup\n";
    EXPECT_EQ(run("--config \"" + cfg.string() + "\" uniqueness").code, 1);
}

TEST(Cli, PlotsAreValidSvg)
{
    std::size_t polygons = 0, first = 0;
    CliRun oct = run("plot --kind dual --norm slope --weights 3.5,1.5");
    ASSERT_EQ(oct.code, 0);
    check_svg(oct.out, polygons, first);
    EXPECT_EQ(first, 8u);

    CliRun diamond = run("plot --kind dual --norm sup --matrix " + data("sup_vertex.csv"));
    ASSERT_EQ(diamond.code, 0);
    check_svg(diamond.out, polygons, first);
    EXPECT_EQ(first, 4u);
    const std::string highlighted_vertex = "r=\"5\" fill=\"#d02020\"";
    EXPECT_NE(diamond.out.find(highlighted_vertex), std::string::npos);

    CliRun square = run("plot --kind dual --norm l1 --matrix " + data("bp_unique.csv"));
    ASSERT_EQ(square.code, 0);
    check_svg(square.out, polygons, first);
    EXPECT_EQ(first, 4u);
    EXPECT_EQ(square.out.find(highlighted_vertex), std::string::npos);
    EXPECT_NE(square.out.find("stroke=\"#d02020\" stroke-width=\"4\""), std::string::npos);

    CliRun null = run("plot --kind null --norm slope --weights 5.5,3.5,1.5 --matrix " + data("slope3.csv") + " --response 40,-3");
    ASSERT_EQ(null.code, 0);
    check_svg(null.out, polygons, first);
    EXPECT_GE(first, 4u);

    EXPECT_EQ(run("plot --kind dual --norm slope --weights 3.5,1.5").out, oct.out);
    EXPECT_EQ(run("plot --kind null --norm l1 --matrix " + data("bp_unique.csv")).code, 2);
}

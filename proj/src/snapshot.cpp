#include "ksmix/snapshot.hpp"

#include <bit>
#include <filesystem>
#include <fstream>

#include "ksmix/errors.hpp"

namespace ksmix {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "snapshot format is float64-le; big-endian hosts are not supported");

void write_snapshot(const std::string& base_path, const ScalarField& f, double t,
                    const nlohmann::json& meta) {
    const Grid& g = f.grid();
    if (f.empty()) throw input_error("write_snapshot: empty field");
    const fs::path base(base_path);
    const fs::path data_path = fs::path(base_path + ".f64");

    {
        std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("write_snapshot: cannot open " + data_path.string());
        const ArrayXd& s = f.samples();
        out.write(reinterpret_cast<const char*>(s.data()),
                  static_cast<std::streamsize>(g.cells * sizeof(double)));
        if (!out) throw io_error("write_snapshot: short write to " + data_path.string());
    }

    nlohmann::json j{{"version", 1},
                     {"kind", "scalar-field"},
                     {"d", g.d},
                     {"n", g.n},
                     {"t", t},
                     {"layout", "row-major"},
                     {"scalar", "float64-le"},
                     {"data", data_path.filename().string()},
                     {"meta", meta}};
    std::ofstream out(base_path + ".json", std::ios::trunc);
    if (!out) throw io_error("write_snapshot: cannot open " + base_path + ".json");
    out << j.dump(2) << "\n";
    if (!out) throw io_error("write_snapshot: short write to " + base_path + ".json");
}

Snapshot read_snapshot(const std::string& path) {
    fs::path jp(path);
    if (jp.extension() != ".json") jp += ".json";
    std::ifstream in(jp);
    if (!in) throw io_error("read_snapshot: cannot open " + jp.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("read_snapshot: bad JSON in " + jp.string() + ": " + e.what());
    }

    if (j.value("kind", "") != std::string("scalar-field"))
        throw io_error("read_snapshot: " + jp.string() + " is not a scalar-field snapshot");
    if (j.value("scalar", "") != std::string("float64-le"))
        throw io_error("read_snapshot: unsupported scalar encoding in " + jp.string());
    const Grid g = make_grid(j.at("d").get<int>(), j.at("n").get<int>());

    const fs::path data_path = jp.parent_path() / j.at("data").get<std::string>();
    std::ifstream data(data_path, std::ios::binary);
    if (!data) throw io_error("read_snapshot: cannot open " + data_path.string());
    ArrayXd s(g.cells);
    data.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(g.cells * sizeof(double)));
    if (data.gcount() != static_cast<std::streamsize>(g.cells * sizeof(double)))
        throw io_error("read_snapshot: " + data_path.string() + " holds fewer than " +
                       std::to_string(g.cells) + " samples");

    Snapshot snap;
    snap.field = ScalarField::from_samples(g, std::move(s));
    snap.t = j.value("t", 0.0);
    snap.meta = j.value("meta", nlohmann::json::object());
    return snap;
}

}  // namespace ksmix

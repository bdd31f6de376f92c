#include "kinchain/io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace kinchain {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "grid dumps assume a little-endian host");

namespace {
json axes_to_json(const std::vector<AxisGrid>& axes) {
    json out = json::array();
    for (const AxisGrid& ax : axes) {
        json comps = json::array();
        for (const AxisComponent& c : ax.comps)
            comps.push_back({{"min", c.lo}, {"max", c.hi}, {"points", c.points}});
        out.push_back({{"order", ax.order}, {"components", comps}});
    }
    return out;
}

std::vector<AxisGrid> axes_from_json(const json& j, const std::string& path) {
    std::vector<AxisGrid> axes;
    for (const json& jax : j) {
        AxisGrid ax;
        ax.order = jax.at("order").get<int>();
        for (const json& jc : jax.at("components")) {
            AxisComponent c;
            c.lo = jc.at("min").get<double>();
            c.hi = jc.at("max").get<double>();
            c.points = jc.at("points").get<int>();
            ax.comps.push_back(c);
        }
        axes.push_back(std::move(ax));
    }
    if (axes.empty() && !j.is_array()) throw IoError(path + ": malformed axes header");
    return axes;
}
} // namespace

void write_grid_dump(const DistributionField& f, const std::filesystem::path& path) {
    json header;
    header["format"] = "kinchain-grid-v1";
    json set = json::array();
    for (int o : f.set) set.push_back(o);
    header["index_set"] = set;
    header["axes"] = axes_to_json(f.axes);
    header["time"] = f.time;
    header["payload_bytes"] = f.values.size() * sizeof(double);

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << header.dump() << '\n';
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw IoError("write failed: " + path.string());
}

DistributionField read_grid_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw IoError("missing header line: " + path.string());

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": bad header: " + e.what());
    }
    if (header.value("format", "") != std::string("kinchain-grid-v1"))
        throw IoError(path.string() + ": unknown dump format");

    std::vector<int> orders;
    for (const json& o : header.at("index_set")) orders.push_back(o.get<int>());
    std::vector<AxisGrid> axes = axes_from_json(header.at("axes"), path.string());
    double time = header.at("time").get<double>();
    std::size_t payload = header.at("payload_bytes").get<std::size_t>();
    if (payload % sizeof(double) != 0)
        throw IoError(path.string() + ": payload size is not a whole number of doubles");

    std::vector<double> values(payload / sizeof(double));
    is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(payload));
    if (static_cast<std::size_t>(is.gcount()) != payload)
        throw IoError(path.string() + ": payload truncated (expected " +
                      std::to_string(payload) + " bytes, got " + std::to_string(is.gcount()) +
                      ")");
    char extra;
    if (is.read(&extra, 1))
        throw IoError(path.string() + ": trailing bytes after payload");

    try {
        return make_field(KinematicIndexSet(std::move(orders)), std::move(axes),
                          std::move(values), time);
    } catch (const Error& e) {
        throw IoError(path.string() + ": header/payload mismatch: " + e.what());
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream os;
    std::size_t columns = 0;
    std::filesystem::path path;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : impl_(std::make_unique<Impl>()) {
    impl_->os.open(path, std::ios::binary); // binary keeps line endings deterministic
    impl_->path = path;
    if (!impl_->os) throw IoError("cannot open for writing: " + path.string());
    impl_->columns = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) impl_->os << ',';
        impl_->os << columns[i];
    }
    impl_->os << '\n';
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->columns)
        throw IoError(impl_->path.string() + ": row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) impl_->os << ',';
        impl_->os << format_double(values[i]);
    }
    impl_->os << '\n';
    if (!impl_->os) throw IoError("write failed: " + impl_->path.string());
}

void CsvWriter::row_named(const std::string& label, const std::vector<double>& values) {
    if (values.size() + 1 != impl_->columns)
        throw IoError(impl_->path.string() + ": row width mismatch");
    impl_->os << label;
    for (double v : values) impl_->os << ',' << format_double(v);
    impl_->os << '\n';
    if (!impl_->os) throw IoError("write failed: " + impl_->path.string());
}

} // namespace kinchain

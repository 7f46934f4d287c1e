#include "iqpe/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "json.hpp"

namespace iqpe {

using nlohmann::json;

std::string to_string(SamplingMode mode) {
    return mode == SamplingMode::Exact ? "exact" : "sampled";
}

SamplingMode parse_sampling_mode(std::string_view text) {
    if (text == "exact") return SamplingMode::Exact;
    if (text == "sampled") return SamplingMode::Sampled;
    throw Error("mode must be 'exact' or 'sampled', got '" + std::string(text) + "'");
}

void write_trace_json(std::ostream& os, const RefinementTrace& trace, SamplingMode mode) {
    json iterations = json::array();
    for (const auto& r : trace.iterations) {
        iterations.push_back({
            {"n", r.n},
            {"alpha", r.alpha},
            {"y", r.y},
            {"plateau_start", r.plateau_start},
            {"c_slots", r.c_slots},
            {"interval_lo", r.interval.lo()},
            {"interval_hi", r.interval.hi()},
            {"interval_center", r.interval.center},
            {"interval_half_width", r.interval.half_width},
            {"epsilon", r.epsilon},
            {"attempts", r.attempts},
        });
    }
    const json doc = {
        {"schema", kTraceSchemaVersion},
        {"n_ancilla", trace.n_ancilla},
        {"delta_t", trace.delta_t},
        {"mode", to_string(mode)},
        {"iterations", std::move(iterations)},
        {"energy_low", trace.energy_low},
        {"energy_high", trace.energy_high},
    };
    os << doc.dump(2) << '\n';
}

RefinementTrace read_trace_json(std::istream& is) {
    json doc;
    try {
        is >> doc;
        if (doc.at("schema").get<int>() != kTraceSchemaVersion) {
            throw Error("trace json: unsupported schema version " + doc.at("schema").dump());
        }
        RefinementTrace trace;
        trace.n_ancilla = doc.at("n_ancilla").get<int>();
        trace.delta_t = doc.at("delta_t").get<double>();
        trace.energy_low = doc.at("energy_low").get<double>();
        trace.energy_high = doc.at("energy_high").get<double>();
        for (const auto& it : doc.at("iterations")) {
            RefinementRecord r;
            r.n = it.at("n").get<int>();
            r.alpha = it.at("alpha").get<std::uint64_t>();
            r.y = it.at("y").get<std::size_t>();
            r.plateau_start = it.value("plateau_start", r.y);
            r.c_slots = it.at("c_slots").get<std::size_t>();
            if (it.contains("interval_center")) {
                r.interval = PhaseInterval::make(it.at("interval_center").get<double>(),
                                                 it.at("interval_half_width").get<double>());
            } else {
                const double lo = it.at("interval_lo").get<double>();
                const double hi = it.at("interval_hi").get<double>();
                r.interval = PhaseInterval::make(0.5 * (lo + hi), 0.5 * (hi - lo));
            }
            r.epsilon = it.at("epsilon").get<double>();
            r.attempts = it.value("attempts", 1);
            trace.iterations.push_back(r);
        }
        return trace;
    } catch (const json::exception& e) {
        throw Error(std::string("trace json: ") + e.what());
    }
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::system_error(errno, std::generic_category(), "cannot open " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::system_error(ec, "cannot move output into " + path.string());
    }
}

}  // namespace iqpe

#include "aoi/json_io.hpp"

#include <fstream>
#include <sstream>

#include "aoi/errors.hpp"

namespace aoi {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw InvalidDistribution(std::string("missing field \"") + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number()) throw InvalidDistribution(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw InvalidDistribution(std::string("field \"") + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw InvalidDistribution(std::string("field \"") + key + "\" must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const DistributionSpec& dist) {
    nlohmann::json j;
    j["kind"] = std::string(dist.kind_name());
    std::visit(overloaded{
                   [&](const Exponential& d) { j["rate"] = d.rate; },
                   [&](const ShiftedExponential& d) {
                       j["rate"] = d.rate;
                       j["shift"] = d.shift;
                   },
                   [&](const Deterministic& d) { j["value"] = d.value; },
                   [&](const Uniform& d) {
                       j["lower"] = d.lower;
                       j["upper"] = d.upper;
                   },
                   [&](const Rayleigh& d) { j["scale"] = d.scale; },
                   [&](const Erlang& d) {
                       j["shape"] = d.shape;
                       j["rate"] = d.rate;
                   },
                   [&](const Hyperexponential& d) {
                       j["weights"] = d.weights;
                       j["rates"] = d.rates;
                   },
               },
               dist.kind());
    return j;
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidDistribution("distribution must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw InvalidDistribution("distribution needs a string \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return DistributionSpec::exponential(number(j, "rate"));
    if (kind == "shifted_exponential")
        return DistributionSpec::shifted_exponential(number(j, "rate"), number(j, "shift"));
    if (kind == "deterministic") return DistributionSpec::deterministic(number(j, "value"));
    if (kind == "uniform") return DistributionSpec::uniform(number(j, "lower"), number(j, "upper"));
    if (kind == "rayleigh") return DistributionSpec::rayleigh(number(j, "scale"));
    if (kind == "erlang") {
        if (!j.contains("shape") || !j.at("shape").is_number_integer())
            throw InvalidDistribution("erlang \"shape\" must be an integer");
        return DistributionSpec::erlang(j.at("shape").get<int>(), number(j, "rate"));
    }
    if (kind == "hyperexponential")
        return DistributionSpec::hyperexponential(numbers(j, "weights"), numbers(j, "rates"));
    throw InvalidDistribution("unknown distribution kind \"" + kind + "\"");
}

DistributionSpec parse_distribution(const std::string& text) {
    std::string body = text;
    if (!text.empty() && text.front() == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw InvalidDistribution("cannot open " + text.substr(1));
        std::ostringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidDistribution(std::string("malformed JSON: ") + e.what());
    }
    return distribution_from_json(j);
}

}  // namespace aoi

#include "tenk/parser/export.hpp"

#include <json.hpp>
#include <sstream>

#include "tenk/csv.hpp"
#include "tenk/error.hpp"
#include "tenk/fs.hpp"

namespace tenk::parser {

using json = nlohmann::json;

std::string export_csv(const SectionedFiling& filing, bool narrative_only) {
    std::string out = csv::row({"Section", "Element Type", "Text"});
    for (const auto& e : filing.elements) {
        if (narrative_only && e.element_type != ElementType::NarrativeText) continue;
        out += csv::row({std::string(section_info(e.section).display), std::string(to_string(e.element_type)), e.text},
                        {false, false, true});
    }
    return out;
}

std::vector<CsvRow> read_csv(std::string_view data) {
    auto records = csv::parse(data);
    if (records.empty() || records.front() != std::vector<std::string>{"Section", "Element Type", "Text"}) {
        throw Error(ErrorCode::InvalidArgument, "missing 'Section,Element Type,Text' header");
    }
    std::vector<CsvRow> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.size() == 1 && r.front().empty()) continue;
        if (r.size() != 3) throw Error(ErrorCode::InvalidArgument, "CSV row " + std::to_string(i) + " has " + std::to_string(r.size()) + " fields");
        auto section = parse_section(r[0]);
        auto type = element_type_from_string(r[1]);
        if (!section || !type) throw Error(ErrorCode::InvalidArgument, "CSV row " + std::to_string(i) + " has unknown labels");
        rows.push_back(CsvRow{*section, *type, r[2]});
    }
    return rows;
}

std::string serialize_isd(const SectionedFiling& filing) {
    std::string out;
    out += json{{"kind", "filing"}, {"company", filing.company}, {"fiscal_year", filing.fiscal_year},
                {"elements", filing.elements.size()}}
               .dump();
    out.push_back('\n');
    for (const auto& e : filing.elements) {
        out += json{{"kind", "element"},
                    {"ordinal", e.ordinal},
                    {"element_type", to_string(e.element_type)},
                    {"section", section_info(e.section).key},
                    {"text", e.text}}
                   .dump();
        out.push_back('\n');
    }
    return out;
}

SectionedFiling deserialize_isd(std::string_view data) {
    SectionedFiling filing;
    std::istringstream in{std::string(data)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto record = json::parse(line, nullptr, false);
        auto fail = [&](const std::string& why) {
            return Error(ErrorCode::StorageCorrupt, "ISD line " + std::to_string(line_no) + ": " + why);
        };
        if (!record.is_object() || !record.contains("kind")) throw fail("not a record");
        try {
            if (record["kind"] == "filing") {
                filing.company = record.at("company").get<std::string>();
                filing.fiscal_year = record.at("fiscal_year").get<int>();
                header = true;
            } else if (record["kind"] == "element") {
                auto type = element_type_from_string(record.at("element_type").get<std::string>());
                auto section = parse_section(record.at("section").get<std::string>());
                if (!type || !section) throw fail("unknown element type or section");
                filing.elements.push_back(FilingElement{record.at("ordinal").get<std::size_t>(), *type,
                                                        record.at("text").get<std::string>(), *section});
            } else {
                throw fail("unknown record kind");
            }
        } catch (const json::exception& e) {
            throw fail(e.what());
        }
    }
    if (!header) throw Error(ErrorCode::StorageCorrupt, "ISD lacks a filing header record");
    return filing;
}

void write_isd(const SectionedFiling& filing, const std::filesystem::path& path) {
    fs::atomic_write(path, serialize_isd(filing), ErrorCode::StorageCorrupt);
}

SectionedFiling read_isd(const std::filesystem::path& path) {
    auto data = fs::read_file(path);
    if (!data) throw Error(ErrorCode::NotFound, "no ISD at " + path.string());
    return deserialize_isd(*data);
}

}  // namespace tenk::parser

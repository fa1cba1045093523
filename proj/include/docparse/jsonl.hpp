#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "docparse/doc_model.hpp"
#include "docparse/metrics.hpp"
#include "docparse/tables.hpp"

namespace docparse {

// JSONL document interchange: one document per line with fields
//   blocks  array of {text?, bbox?: [x0,y0,x1,y1], class?}
//   prompt  {text_mode, boxes, classes}
//   page    optional {width, height}
// Coordinates are normalized floats; reading snaps them onto the grid.

nlohmann::ordered_json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);  // throws IoError

std::string document_to_jsonl(const Document& doc);          // no trailing newline
Document document_from_jsonl(std::string_view line);

std::vector<Document> read_jsonl(std::istream& in);           // skips blank lines
void write_jsonl(std::ostream& out, const std::vector<Document>& docs);

nlohmann::ordered_json table_to_json(const TableModel& t);

nlohmann::ordered_json scores_to_json(const DocScores& s);
nlohmann::ordered_json report_to_json(const CorpusReport& report,
                                      std::string_view profile);

}  // namespace docparse

#include "docparse/jsonl.hpp"

#include <istream>
#include <ostream>

namespace docparse {

using nlohmann::json;
using nlohmann::ordered_json;

nlohmann::ordered_json document_to_json(const Document& doc) {
    ordered_json j;
    j["blocks"] = ordered_json::array();
    for (const Block& b : doc.blocks) {
        ordered_json jb = ordered_json::object();
        if (b.text) jb["text"] = *b.text;
        if (b.bbox)
            jb["bbox"] = {b.bbox->x0(), b.bbox->y0(), b.bbox->x1(), b.bbox->y1()};
        if (b.cls) jb["class"] = b.cls->name();
        j["blocks"].push_back(std::move(jb));
    }
    j["prompt"] = {
        {"text_mode", std::string(text_mode_name(doc.prompt.text_mode))},
        {"boxes", doc.prompt.boxes},
        {"classes", doc.prompt.classes},
    };
    if (doc.page) j["page"] = {{"width", doc.page->width}, {"height", doc.page->height}};
    return j;
}

Document document_from_json(const json& j) {
    if (!j.is_object()) throw IoError("document must be a JSON object");
    Document doc;
    try {
        if (j.contains("prompt")) {
            const json& p = j.at("prompt");
            doc.prompt.text_mode = text_mode_from_name(p.value("text_mode", "markdown"));
            doc.prompt.boxes = p.value("boxes", true);
            doc.prompt.classes = p.value("classes", true);
        }
        for (const json& jb : j.value("blocks", json::array())) {
            Block b;
            if (jb.contains("text")) b.text = jb.at("text").get<std::string>();
            if (jb.contains("bbox")) {
                const json& box = jb.at("bbox");
                if (!box.is_array() || box.size() != 4)
                    throw IoError("bbox must be [x0,y0,x1,y1]");
                b.bbox = BBox::from_normalized(box[0].get<double>(), box[1].get<double>(),
                                               box[2].get<double>(), box[3].get<double>());
            }
            if (jb.contains("class"))
                b.cls = SemanticClass::from_name(jb.at("class").get<std::string>());
            doc.blocks.push_back(std::move(b));
        }
        if (j.contains("page")) {
            PageSize page;
            page.width = j.at("page").value("width", 0.0);
            page.height = j.at("page").value("height", 0.0);
            doc.page = page;
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("document JSON malformed: ") + e.what());
    }
    return doc;
}

std::string document_to_jsonl(const Document& doc) {
    return document_to_json(doc).dump();
}

Document document_from_jsonl(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid JSONL line: ") + e.what());
    }
    return document_from_json(j);
}

std::vector<Document> read_jsonl(std::istream& in) {
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char c : line)
            if (c != ' ' && c != '\t' && c != '\r') blank = false;
        if (blank) continue;
        try {
            docs.push_back(document_from_jsonl(line));
        } catch (const Error& e) {
            throw IoError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return docs;
}

void write_jsonl(std::ostream& out, const std::vector<Document>& docs) {
    for (const Document& doc : docs) out << document_to_jsonl(doc) << '\n';
}

nlohmann::ordered_json table_to_json(const TableModel& t) {
    ordered_json j;
    j["n_rows"] = t.n_rows;
    j["n_cols"] = t.n_cols;
    j["cells"] = ordered_json::array();
    for (const TableCell& c : t.cells) {
        ordered_json jc;
        jc["row"] = c.row;
        jc["col"] = c.col;
        jc["row_span"] = c.row_span;
        jc["col_span"] = c.col_span;
        jc["content"] = c.content;
        jc["header"] = c.header;
        j["cells"].push_back(std::move(jc));
    }
    return j;
}

nlohmann::ordered_json scores_to_json(const DocScores& s) {
    ordered_json j;
    j["wer"] = s.wer;
    j["f1"] = s.f1;
    j["edit_dist"] = s.edit_dist;
    j["bleu"] = s.bleu;
    j["teds"] = s.teds ? ordered_json(*s.teds) : ordered_json(nullptr);
    j["s_teds"] = s.s_teds ? ordered_json(*s.s_teds) : ordered_json(nullptr);
    return j;
}

nlohmann::ordered_json report_to_json(const CorpusReport& report,
                                      std::string_view profile) {
    ordered_json j;
    j["profile"] = std::string(profile);
    j["documents"] = ordered_json::array();
    for (std::size_t i = 0; i < report.documents.size(); ++i) {
        ordered_json d;
        d["index"] = i;
        d.update(scores_to_json(report.documents[i]));
        j["documents"].push_back(std::move(d));
    }
    ordered_json agg = scores_to_json(report.aggregate);
    agg["documents"] = report.documents.size();
    agg["documents_with_tables"] = report.documents_with_tables;
    j["aggregate"] = std::move(agg);
    return j;
}

}  // namespace docparse

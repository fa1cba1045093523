// docparse: consumer-side toolkit for the tagged document-OCR output format.
// Subcommands: parse, serialize, validate, reorder, convert-table, eval,
// sim-mtp. Reads stdin / writes stdout unless paths are given; diagnostics
// go to stderr. Exit codes: 0 success, 1 input/grammar errors, 2 usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "docparse/doc_model.hpp"
#include "docparse/grammar.hpp"
#include "docparse/jsonl.hpp"
#include "docparse/metrics.hpp"
#include "docparse/mtp.hpp"
#include "docparse/reading_order.hpp"
#include "docparse/tables.hpp"

namespace {

using namespace docparse;

std::string read_all(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") return read_all(std::cin);
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open input file " + path);
    return read_all(f);
}

void write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + path);
    f << data;
}

std::vector<Document> read_documents(const std::string& path) {
    std::istringstream ss(read_input(path));
    return read_jsonl(ss);
}

bool env_lenient() {
    const char* v = std::getenv("DOCPARSE_LENIENT");
    return v != nullptr && std::string_view(v) == "1";
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
    for (const Diagnostic& d : diags)
        std::cerr << "diagnostic: byte " << d.offset << ": " << d.message << "\n";
}

OrderPolicy policy_from_name(const std::string& name) {
    if (name == "v11") return OrderPolicy::CanonicalV11;
    if (name == "tc") return OrderPolicy::NaturalTC;
    throw IoError("unknown order policy \"" + name + "\" (use v11 or tc)");
}

int cmd_parse(const std::string& input, const std::string& output,
              const std::string& prompt_tokens, bool lenient, bool clip) {
    const PromptConfig prompt = prompt_from_tokens(prompt_tokens);
    ParseOptions opts;
    opts.lenient = lenient || env_lenient();
    opts.clip = clip;
    ParseResult result = parse_output(read_input(input), prompt, opts);
    print_diagnostics(result.diagnostics);
    write_output(output, document_to_jsonl(result.doc) + "\n");
    return 0;
}

int cmd_serialize(const std::string& input, const std::string& output, bool lenient) {
    const bool relaxed = lenient || env_lenient();
    std::string out;
    for (const Document& doc : read_documents(input))
        out += (relaxed ? serialize_lenient(doc) : serialize(doc)) + "\n";
    write_output(output, out);
    return 0;
}

int cmd_validate(const std::string& input, const std::string& output,
                 const std::string& order) {
    const std::vector<Document> docs = read_documents(input);
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        nlohmann::ordered_json j;
        j["index"] = i;
        j["violations"] = nlohmann::ordered_json::array();
        for (const std::string& v : check_document(docs[i]))
            j["violations"].push_back({{"rule", "document-invariant"}, {"detail", v}});
        if (!order.empty()) {
            try {
                for (const OrderViolation& v :
                     check_order(docs[i], policy_from_name(order)))
                    j["violations"].push_back({{"rule", v.rule},
                                               {"earlier_index", v.earlier_index},
                                               {"later_index", v.later_index},
                                               {"detail", v.detail}});
            } catch (const ContractError& e) {
                j["violations"].push_back(
                    {{"rule", "order-contract"}, {"detail", e.what()}});
            }
        }
        out += j.dump() + "\n";
    }
    write_output(output, out);
    return 0;
}

int cmd_reorder(const std::string& input, const std::string& output,
                const std::string& order, bool lenient) {
    const OrderPolicy policy = policy_from_name(order);
    const bool relaxed = lenient || env_lenient();
    std::string out;
    for (const Document& doc : read_documents(input)) {
        const Document sorted = relaxed ? reorder_lenient(doc, policy)
                                        : reorder(doc, policy);
        out += document_to_jsonl(sorted) + "\n";
    }
    write_output(output, out);
    return 0;
}

int cmd_convert_table(const std::string& input, const std::string& output,
                      const std::string& from, const std::string& to) {
    const std::string src = read_input(input);
    TableParseResult parsed;
    if (from == "latex") parsed = parse_latex_table_ex(src);
    else if (from == "html") parsed = parse_html_table_ex(src);
    else throw IoError("unknown --from format \"" + from + "\"");
    print_diagnostics(parsed.diagnostics);

    std::string out;
    if (to == "html") out = emit_html(parsed.table) + "\n";
    else if (to == "latex") out = emit_latex(parsed.table) + "\n";
    else if (to == "markdown") out = emit_markdown(parsed.table);
    else if (to == "json") out = table_to_json(parsed.table).dump() + "\n";
    else throw IoError("unknown --to format \"" + to + "\"");
    write_output(output, out);
    return 0;
}

int cmd_eval(const std::string& ref_path, const std::string& hyp_path,
             const std::string& output, const std::string& profile) {
    NormOptions opts;
    if (profile == "plain") opts = NormOptions::plain_profile();
    else if (profile == "mip") opts = NormOptions::maskout_profile();
    else if (profile == "tables") opts = NormOptions::raw_profile();
    else throw IoError("unknown profile \"" + profile + "\"");

    const std::vector<Document> refs = read_documents(ref_path);
    const std::vector<Document> hyps = read_documents(hyp_path);
    if (refs.size() != hyps.size())
        throw IoError("ref has " + std::to_string(refs.size()) + " documents, hyp has " +
                      std::to_string(hyps.size()));
    const CorpusReport report = score_corpus(refs, hyps, opts);
    write_output(output, report_to_json(report, profile).dump(2) + "\n");
    return 0;
}

int cmd_sim_mtp(const std::string& weights_path, const std::string& prompt_csv, int m,
                int max_len) {
    std::ifstream f(weights_path);
    if (!f) throw IoError("cannot open weights file " + weights_path);
    MtpBundle bundle = load_mtp_bundle(f);

    std::vector<TokenId> prompt;
    std::stringstream ss(prompt_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            prompt.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw IoError("bad token id \"" + item + "\" in --prompt");
        }
    }

    const std::vector<TokenId> seq =
        greedy_decode_multi(*bundle.base, bundle.weights, prompt, m, max_len, bundle.eos);
    std::string out;
    for (std::size_t i = prompt.size(); i < seq.size(); ++i) {
        if (i > prompt.size()) out += ",";
        out += std::to_string(seq[i]);
    }
    std::cout << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolkit for the tagged document-OCR output contract"};
    app.require_subcommand(1);

    std::string input = "-", output = "-";
    std::string prompt_tokens, order, from, to;
    std::string ref_path, hyp_path, profile = "plain", weights_path, prompt_csv;
    bool lenient = false, clip = false;
    int m = 1, max_len = 32;

    CLI::App* parse = app.add_subcommand("parse", "Parse raw tagged output to JSONL");
    parse->add_option("input", input, "Input file (- for stdin)");
    parse->add_option("-o,--output", output, "Output file (- for stdout)");
    parse->add_option("--prompt", prompt_tokens, "Prompt token string")->required();
    parse->add_flag("--lenient", lenient, "Recover instead of failing");
    parse->add_flag("--clip", clip, "Clamp out-of-range coordinates");

    CLI::App* ser = app.add_subcommand("serialize", "JSONL documents to tagged output");
    ser->add_option("input", input, "Input file (- for stdin)");
    ser->add_option("-o,--output", output, "Output file (- for stdout)");
    ser->add_flag("--lenient", lenient, "Serialize best-effort documents");

    CLI::App* val = app.add_subcommand("validate", "Check document invariants");
    val->add_option("input", input, "Input file (- for stdin)");
    val->add_option("-o,--output", output, "Output file (- for stdout)");
    val->add_option("--order", order, "Also check reading order (v11|tc)");

    CLI::App* reord = app.add_subcommand("reorder", "Re-sort blocks under a policy");
    reord->add_option("input", input, "Input file (- for stdin)");
    reord->add_option("-o,--output", output, "Output file (- for stdout)");
    reord->add_option("--order", order, "Order policy (v11|tc)")->required();
    reord->add_flag("--lenient", lenient, "Keep unorderable blocks in place");

    CLI::App* conv = app.add_subcommand("convert-table", "Convert a table between formats");
    conv->add_option("input", input, "Input file (- for stdin)");
    conv->add_option("-o,--output", output, "Output file (- for stdout)");
    conv->add_option("--from", from, "Source format (latex|html)")->required();
    conv->add_option("--to", to, "Target format (html|markdown|latex|json)")->required();

    CLI::App* ev = app.add_subcommand("eval", "Score a hypothesis corpus against a reference");
    ev->add_option("--ref", ref_path, "Reference JSONL")->required();
    ev->add_option("--hyp", hyp_path, "Hypothesis JSONL")->required();
    ev->add_option("-o,--output", output, "Output file (- for stdout)");
    ev->add_option("--profile", profile, "Normalization profile (plain|mip|tables)");

    CLI::App* sim = app.add_subcommand("sim-mtp", "Greedy multi-token decoding simulation");
    sim->add_option("--weights", weights_path, "Weights JSON bundle")->required();
    sim->add_option("--prompt", prompt_csv, "Comma-separated prompt token ids");
    sim->add_option("--m", m, "Tokens per decode step");
    sim->add_option("--max-len", max_len, "Total sequence length cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(parse))
            return cmd_parse(input, output, prompt_tokens, lenient, clip);
        if (app.got_subcommand(ser)) return cmd_serialize(input, output, lenient);
        if (app.got_subcommand(val)) return cmd_validate(input, output, order);
        if (app.got_subcommand(reord)) return cmd_reorder(input, output, order, lenient);
        if (app.got_subcommand(conv)) return cmd_convert_table(input, output, from, to);
        if (app.got_subcommand(ev)) return cmd_eval(ref_path, hyp_path, output, profile);
        if (app.got_subcommand(sim)) return cmd_sim_mtp(weights_path, prompt_csv, m, max_len);
    } catch (const docparse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

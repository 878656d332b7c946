#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tenk/parser/classifier.hpp"
#include "tenk/parser/element.hpp"

namespace tenk::parser {

/// An in-document hyperlink (`<a href="#target">`). `context` is the text of
/// the enclosing table row, or of the enclosing block outside tables.
struct InternalLink {
    std::string target;
    std::string text;
    std::string context;
    std::size_t source_ordinal = 0;
};

/// Anchor ids (`id=` / `<a name=>`) mapped to the ordinal of the first
/// element emitted at or after the anchor, plus every internal link.
struct DocumentAnchors {
    std::map<std::string, std::size_t> targets;
    std::vector<InternalLink> links;
};

struct PartitionedDocument {
    std::vector<FilingElement> elements;
    DocumentAnchors anchors;
};

/// Decodes (UTF-8, falling back to Latin-1), drops script/style/head/XBRL
/// header/hidden content, and emits block-level text in document order,
/// each element classified. All sections are UNKNOWN.
/// Throws NotHtml when the input has no markup, EmptyDocument when no
/// visible text survives.
PartitionedDocument partition_document(std::string_view raw, const ClassifierConfig& config = {});

std::vector<FilingElement> partition_html(std::string_view raw, const ClassifierConfig& config = {});

/// Replaces named and numeric character references.
std::string decode_entities(std::string_view text);

/// Text shown for page-break elements.
inline constexpr std::string_view kPageBreakText = "<PAGE>";

}  // namespace tenk::parser

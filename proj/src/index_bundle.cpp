/*
 * Copyright 2026 The ragforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ragforge/index_bundle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

using nlohmann::json;

namespace {

constexpr char kPostingsMagic[8] = {'R', 'F', 'P', 'O', 'S', 'T', 'N', 'G'};
constexpr std::string_view kMetaFormat = "ragforge-index";
constexpr std::size_t kEmbedBatch = 64;

// Little-endian encoding regardless of host byte order.
void put_u32(std::string& out, std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<char>((value >> shift) & 0xFF));
    }
}

void put_f32(std::string& out, float value) {
    put_u32(out, std::bit_cast<std::uint32_t>(value));
}

class Reader {
public:
    Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t value = 0;
        for (int i = 0; i < 4; ++i) {
            value |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return value;
    }

    float f32() { return std::bit_cast<float>(u32()); }

    std::string bytes(std::size_t count) {
        need(count);
        auto out = data_.substr(pos_, count);
        pos_ += count;
        return out;
    }

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t count) const {
        if (data_.size() - pos_ < count) {
            throw FormatError(name_ + ": unexpected end of file");
        }
    }

    std::string data_;
    std::string name_;
    std::size_t pos_ = 0;
};

void write_postings(std::string& out, std::uint32_t level, const Bm25Index& index) {
    put_u32(out, level);
    put_u32(out, static_cast<std::uint32_t>(index.size()));
    for (const auto length : index.doc_lengths()) {
        put_u32(out, length);
    }
    // Sorted terms keep the file byte-stable across runs.
    std::map<std::string_view, const std::vector<Bm25Index::Posting>*> sorted;
    for (const auto& [term, list] : index.postings()) {
        sorted.emplace(term, &list);
    }
    put_u32(out, static_cast<std::uint32_t>(sorted.size()));
    for (const auto& [term, list] : sorted) {
        put_u32(out, static_cast<std::uint32_t>(term.size()));
        out.append(term);
        put_u32(out, static_cast<std::uint32_t>(list->size()));
        for (const auto& posting : *list) {
            put_u32(out, posting.doc);
            put_u32(out, posting.tf);
        }
    }
}

Bm25Index read_postings(Reader& in, std::uint32_t expected_level, std::vector<std::string> ids, Bm25Params params) {
    if (in.u32() != expected_level) {
        throw FormatError("postings.bin: sections out of order");
    }
    const auto count = in.u32();
    if (count != ids.size()) {
        throw FormatError("postings.bin: document count " + std::to_string(count) + " does not match chunks.jsonl (" +
                          std::to_string(ids.size()) + ")");
    }
    std::vector<std::uint32_t> lengths(count);
    for (auto& length : lengths) {
        length = in.u32();
    }
    std::unordered_map<std::string, std::vector<Bm25Index::Posting>> postings;
    const auto terms = in.u32();
    for (std::uint32_t t = 0; t < terms; ++t) {
        auto term = in.bytes(in.u32());
        const auto df = in.u32();
        if (static_cast<std::size_t>(df) * 8 > in.remaining()) {
            throw FormatError("postings.bin: truncated posting list");
        }
        std::vector<Bm25Index::Posting> list(df);
        for (auto& posting : list) {
            posting.doc = in.u32();
            posting.tf = in.u32();
        }
        postings.emplace(std::move(term), std::move(list));
    }
    return Bm25Index::from_tables(params, std::move(ids), std::move(lengths), std::move(postings));
}

json catalog_to_json(const std::vector<ProgramEntry>& programs) {
    json out = json::array();
    for (const auto& program : programs) {
        json topics = json::array();
        for (const auto& topic : program.topics) {
            topics.push_back({{"topic_id", topic.topic_id}, {"title", topic.title}});
        }
        out.push_back({{"program_id", program.program_id},
                       {"name", program.name},
                       {"language", to_string(program.language)},
                       {"topics", std::move(topics)}});
    }
    return out;
}

std::vector<ProgramEntry> catalog_from_json(const json& value) {
    std::vector<ProgramEntry> out;
    for (const auto& entry : value) {
        ProgramEntry program;
        program.program_id = entry.at("program_id").get<std::string>();
        program.name = entry.at("name").get<std::string>();
        program.language = parse_language(entry.at("language").get<std::string>());
        for (const auto& topic : entry.at("topics")) {
            program.topics.push_back({topic.at("topic_id").get<std::string>(), topic.at("title").get<std::string>()});
        }
        out.push_back(std::move(program));
    }
    return out;
}

template <typename Chunk, typename TextOf>
VectorStore embed_chunks(const std::vector<Chunk>& chunks, TextOf text_of, std::string (Chunk::*id_field),
                         const EmbeddingProvider& provider) {
    VectorStore store(provider.id(), provider.dim());
    std::vector<std::string> batch;
    for (std::size_t start = 0; start < chunks.size(); start += kEmbedBatch) {
        const auto end = std::min(chunks.size(), start + kEmbedBatch);
        batch.clear();
        for (std::size_t i = start; i < end; ++i) {
            batch.push_back(text_of(chunks[i]));
        }
        const auto vectors = provider.embed(batch);
        if (vectors.size() != batch.size()) {
            throw ProtocolError("embedding provider returned the wrong number of vectors");
        }
        for (std::size_t i = start; i < end; ++i) {
            store.add(chunks[i].*id_field, vectors[i - start]);
        }
    }
    return store;
}

}  // namespace

const TopicEntry* ProgramEntry::find_topic(std::string_view topic_id) const {
    for (const auto& topic : topics) {
        if (topic.topic_id == topic_id) {
            return &topic;
        }
    }
    return nullptr;
}

IndexBundle IndexBundle::build(const Corpus& corpus, const EmbeddingProvider& provider, IndexOptions options) {
    IndexBundle bundle;
    bundle.provider_id_ = provider.id();
    bundle.options_ = options;
    bundle.parent_bm25_ = Bm25Index(options.bm25);
    bundle.child_bm25_ = Bm25Index(options.bm25);
    for (const auto& doc : corpus.programs()) {
        ProgramEntry entry{doc.program_id, doc.name, doc.language, {}};
        for (const auto& section : doc.sections) {
            entry.topics.push_back({section.topic_id, section.title});
        }
        bundle.programs_.push_back(std::move(entry));

        auto chunked = chunk_document(doc, options.limits);
        std::move(chunked.parents.begin(), chunked.parents.end(), std::back_inserter(bundle.parents_));
        std::move(chunked.children.begin(), chunked.children.end(), std::back_inserter(bundle.children_));
    }
    for (const auto& parent : bundle.parents_) {
        bundle.parent_bm25_.add(parent.parent_id, parent.text);
    }
    for (const auto& child : bundle.children_) {
        bundle.child_bm25_.add(child.child_id, child.text);
    }
    bundle.link();
    // A boundary split can leave a chunk that is only whitespace; such chunks
    // are embedded through their section title so every vector is defined.
    const auto section_title = [&](const ParentChunk& chunk) {
        const auto* topic = bundle.find_program(chunk.program_id)->find_topic(chunk.topic_id);
        return topic->title.empty() ? chunk.topic_id : topic->title;
    };
    bundle.parent_vectors_ = embed_chunks(
        bundle.parents_,
        [&](const ParentChunk& chunk) {
            return text::trim(chunk.text).empty() ? section_title(chunk) : chunk.text;
        },
        &ParentChunk::parent_id, provider);
    bundle.child_vectors_ = embed_chunks(
        bundle.children_,
        [&](const ChildChunk& chunk) {
            return text::trim(chunk.text).empty() ? section_title(*bundle.find_parent(chunk.parent_id)) : chunk.text;
        },
        &ChildChunk::child_id, provider);
    return bundle;
}

void IndexBundle::link() {
    std::sort(programs_.begin(), programs_.end(),
              [](const ProgramEntry& a, const ProgramEntry& b) { return a.program_id < b.program_id; });
    parent_rows_.clear();
    child_rows_.clear();
    for (std::size_t i = 0; i < parents_.size(); ++i) {
        if (!parent_rows_.emplace(parents_[i].parent_id, i).second) {
            throw IntegrityError("duplicate parent id '" + parents_[i].parent_id + "'");
        }
        if (parents_[i].child_ids.empty()) {
            throw IntegrityError("parent '" + parents_[i].parent_id + "' has no children");
        }
    }
    for (std::size_t i = 0; i < children_.size(); ++i) {
        if (!child_rows_.emplace(children_[i].child_id, i).second) {
            throw IntegrityError("duplicate child id '" + children_[i].child_id + "'");
        }
        if (!parent_rows_.contains(children_[i].parent_id)) {
            throw IntegrityError("child '" + children_[i].child_id + "' points at missing parent '" +
                                 children_[i].parent_id + "'");
        }
    }
    std::size_t listed = 0;
    for (const auto& parent : parents_) {
        for (const auto& child_id : parent.child_ids) {
            const auto* child = find_child(child_id);
            if (!child || child->parent_id != parent.parent_id) {
                throw IntegrityError("parent '" + parent.parent_id + "' lists child '" + child_id +
                                     "' that does not link back");
            }
            ++listed;
        }
    }
    if (listed != children_.size()) {
        throw IntegrityError("some children are not listed by any parent");
    }
}

void IndexBundle::require_provider(std::string_view provider_id) const {
    if (provider_id != provider_id_) {
        throw ConfigError("provider mismatch: index was embedded with '" + provider_id_ +
                          "' but the pipeline uses '" + std::string(provider_id) + "'");
    }
}

const ProgramEntry* IndexBundle::find_program(std::string_view program_id) const {
    const auto it = std::lower_bound(programs_.begin(), programs_.end(), program_id,
                                     [](const ProgramEntry& p, std::string_view id) { return p.program_id < id; });
    return it != programs_.end() && it->program_id == program_id ? &*it : nullptr;
}

const ParentChunk* IndexBundle::find_parent(std::string_view parent_id) const {
    const auto it = parent_rows_.find(std::string(parent_id));
    return it == parent_rows_.end() ? nullptr : &parents_[it->second];
}

const ChildChunk* IndexBundle::find_child(std::string_view child_id) const {
    const auto it = child_rows_.find(std::string(child_id));
    return it == child_rows_.end() ? nullptr : &children_[it->second];
}

std::optional<ChunkLocation> IndexBundle::locate(std::string_view chunk_id) const {
    const auto* parent = find_parent(chunk_id);
    if (!parent) {
        if (const auto* child = find_child(chunk_id)) {
            parent = find_parent(child->parent_id);
        }
    }
    if (!parent) {
        return std::nullopt;
    }
    return ChunkLocation{parent->program_id, parent->topic_id};
}

void IndexBundle::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);

    const json meta = {
        {"format", kMetaFormat},
        {"version", kFormatVersion},
        {"provider_id", provider_id_},
        {"dim", parent_vectors_.dim()},
        {"k1", options_.bm25.k1},
        {"b", options_.bm25.b},
        {"limits", {{"parent", options_.limits.parent}, {"child", options_.limits.child}}},
        {"counts", {{"parents", parents_.size()}, {"children", children_.size()}}},
        {"programs", catalog_to_json(programs_)},
    };
    write_file(dir / "meta.json", meta.dump(2) + "\n");

    std::string chunks;
    for (const auto& parent : parents_) {
        chunks += json{{"kind", "parent"},
                       {"id", parent.parent_id},
                       {"program_id", parent.program_id},
                       {"topic_id", parent.topic_id},
                       {"text", parent.text},
                       {"child_ids", parent.child_ids}}
                      .dump();
        chunks += '\n';
    }
    for (const auto& child : children_) {
        chunks += json{{"kind", "child"}, {"id", child.child_id}, {"parent_id", child.parent_id}, {"text", child.text}}
                      .dump();
        chunks += '\n';
    }
    write_file(dir / "chunks.jsonl", chunks);

    std::string postings(kPostingsMagic, sizeof kPostingsMagic);
    put_u32(postings, static_cast<std::uint32_t>(kFormatVersion));
    put_u32(postings, 2);
    write_postings(postings, 0, parent_bm25_);
    write_postings(postings, 1, child_bm25_);
    write_file(dir / "postings.bin", postings);

    std::string vectors;
    vectors.reserve((parent_vectors_.data().size() + child_vectors_.data().size()) * 4);
    for (const float x : parent_vectors_.data()) {
        put_f32(vectors, x);
    }
    for (const float x : child_vectors_.data()) {
        put_f32(vectors, x);
    }
    write_file(dir / "vectors.bin", vectors);
}

IndexBundle IndexBundle::load(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir / "meta.json")) {
        throw FormatError("no index at '" + dir.string() + "' (meta.json missing)");
    }
    json meta;
    try {
        meta = json::parse(read_file(dir / "meta.json"));
    } catch (const json::parse_error& e) {
        throw FormatError("meta.json: " + std::string(e.what()));
    }
    if (!meta.is_object() || meta.value("format", "") != kMetaFormat) {
        throw FormatError("meta.json: not a ragforge index");
    }
    if (meta.value("version", -1) != kFormatVersion) {
        throw FormatError("index format version " + meta.value("version", json(-1)).dump() +
                          " is not supported (expected " + std::to_string(kFormatVersion) +
                          "); rebuild it with `ragforge index`");
    }

    IndexBundle bundle;
    std::size_t dim = 0;
    try {
        bundle.provider_id_ = meta.at("provider_id").get<std::string>();
        bundle.options_.bm25 = {meta.at("k1").get<double>(), meta.at("b").get<double>()};
        bundle.options_.limits = {meta.at("limits").at("parent").get<std::size_t>(),
                                  meta.at("limits").at("child").get<std::size_t>()};
        bundle.programs_ = catalog_from_json(meta.at("programs"));
        dim = meta.at("dim").get<std::size_t>();
    } catch (const json::exception& e) {
        throw FormatError("meta.json: " + std::string(e.what()));
    }

    std::istringstream chunk_lines(read_file(dir / "chunks.jsonl"));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(chunk_lines, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto row = json::parse(line);
            const auto kind = row.at("kind").get<std::string>();
            if (kind == "parent") {
                bundle.parents_.push_back({row.at("id").get<std::string>(), row.at("program_id").get<std::string>(),
                                           row.at("topic_id").get<std::string>(), row.at("text").get<std::string>(),
                                           row.at("child_ids").get<std::vector<std::string>>()});
            } else if (kind == "child") {
                bundle.children_.push_back({row.at("id").get<std::string>(), row.at("parent_id").get<std::string>(),
                                            row.at("text").get<std::string>()});
            } else {
                throw FormatError("unknown chunk kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw FormatError("chunks.jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    bundle.link();

    Reader postings(read_file(dir / "postings.bin"), "postings.bin");
    const auto magic = postings.bytes(sizeof kPostingsMagic);
    if (std::memcmp(magic.data(), kPostingsMagic, sizeof kPostingsMagic) != 0) {
        throw FormatError("postings.bin: bad magic header");
    }
    if (postings.u32() != static_cast<std::uint32_t>(kFormatVersion)) {
        throw FormatError("postings.bin: unsupported version");
    }
    if (postings.u32() != 2) {
        throw FormatError("postings.bin: expected two sections");
    }
    std::vector<std::string> parent_ids;
    for (const auto& parent : bundle.parents_) {
        parent_ids.push_back(parent.parent_id);
    }
    std::vector<std::string> child_ids;
    for (const auto& child : bundle.children_) {
        child_ids.push_back(child.child_id);
    }
    bundle.parent_bm25_ = read_postings(postings, 0, parent_ids, bundle.options_.bm25);
    bundle.child_bm25_ = read_postings(postings, 1, child_ids, bundle.options_.bm25);
    if (!postings.done()) {
        throw FormatError("postings.bin: trailing bytes");
    }

    Reader vectors(read_file(dir / "vectors.bin"), "vectors.bin");
    const auto rows = parent_ids.size() + child_ids.size();
    if (vectors.remaining() != rows * dim * 4) {
        throw FormatError("vectors.bin: expected " + std::to_string(rows) + " rows of dim " + std::to_string(dim));
    }
    const auto read_store = [&](const std::vector<std::string>& ids) {
        VectorStore store(bundle.provider_id_, dim);
        std::vector<float> row(dim);
        for (const auto& id : ids) {
            for (auto& x : row) {
                x = vectors.f32();
            }
            store.add(id, row);
        }
        return store;
    };
    bundle.parent_vectors_ = read_store(parent_ids);
    bundle.child_vectors_ = read_store(child_ids);
    return bundle;
}

}  // namespace ragforge

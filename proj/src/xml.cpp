// Copyright 2026 The xfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xfed/xml.hpp"

#include "xfed/xtuple.hpp"

namespace xfed {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool all_space(std::string_view s) {
  for (char c : s)
    if (!is_space(c)) return false;
  return true;
}

}  // namespace

std::string xml_unescape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out.push_back(raw[i]);
      continue;
    }
    std::size_t semi = raw.find(';', i);
    if (semi == std::string_view::npos)
      throw StreamError("xml: unterminated entity");
    std::string_view ent = raw.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else throw StreamError("xml: unknown entity &" + std::string(ent) + ";");
    i = semi;
  }
  return out;
}

XmlEventStream::XmlEventStream(std::string content)
    : content_(std::move(content)) {}

Event XmlEventStream::next() {
  if (done_) return Event::end();
  if (pending_close_) {
    pending_close_ = false;
    if (open_.empty()) pending_boundary_ = true;
    return Event::close();
  }
  if (pending_boundary_) {
    pending_boundary_ = false;
    return Event::boundary();
  }
  try {
    return lex();
  } catch (const StreamError& e) {
    done_ = true;
    return Event::error(e.what());
  }
}

Event XmlEventStream::lex() {
  while (pos_ < content_.size()) {
    if (content_[pos_] == '<') {
      // Prologue and comments are skipped; anything else must be a tag.
      if (content_.compare(pos_, 2, "<?") == 0) {
        std::size_t end = content_.find("?>", pos_);
        if (end == std::string::npos) throw StreamError("xml: unterminated prologue");
        pos_ = end + 2;
        continue;
      }
      if (content_.compare(pos_, 4, "<!--") == 0) {
        std::size_t end = content_.find("-->", pos_);
        if (end == std::string::npos) throw StreamError("xml: unterminated comment");
        pos_ = end + 3;
        continue;
      }
      bool closing = pos_ + 1 < content_.size() && content_[pos_ + 1] == '/';
      std::size_t name_begin = pos_ + (closing ? 2 : 1);
      std::size_t i = name_begin;
      while (i < content_.size() && content_[i] != '>' && !is_space(content_[i]))
        ++i;
      std::string name = content_.substr(name_begin, i - name_begin);
      // Skip anything (attributes) up to '>'.
      std::size_t gt = content_.find('>', i);
      if (gt == std::string::npos) throw StreamError("xml: unterminated tag");
      bool self_closing = gt > name_begin && content_[gt - 1] == '/';
      if (self_closing && !closing && !name.empty() && name.back() == '/')
        name.pop_back();
      pos_ = gt + 1;
      if (!is_valid_step(name) || name == "*")
        throw StreamError("xml: bad element name '" + name + "'");
      if (closing) {
        if (open_.empty() || open_.back() != name)
          throw StreamError("xml: mismatched </" + name + ">");
        open_.pop_back();
        if (open_.empty()) pending_boundary_ = true;
        return Event::close();
      }
      if (self_closing) {
        pending_close_ = true;  // Close on the next pull.
        return Event::open(name);
      }
      open_.push_back(name);
      return Event::open(name);
    }
    // Text run up to the next '<'.
    std::size_t lt = content_.find('<', pos_);
    if (lt == std::string::npos) lt = content_.size();
    std::string_view run(content_.data() + pos_, lt - pos_);
    pos_ = lt;
    if (open_.empty()) {
      if (!all_space(run)) throw StreamError("xml: text outside any element");
      continue;
    }
    if (all_space(run)) continue;
    return Event::text(xml_unescape(run));
  }
  if (!open_.empty()) throw StreamError("xml: unclosed <" + open_.back() + ">");
  done_ = true;
  return Event::end();
}

std::vector<XTreePtr> parse_document(std::string_view text) {
  XmlEventStream s{std::string(text)};
  std::vector<XTreePtr> forest;
  std::shared_ptr<XTree> cur;
  std::vector<NodeId> stack;
  for (;;) {
    Event e = s.next();
    switch (e.kind) {
      case Event::Kind::Open:
        if (!cur) {
          cur = std::make_shared<XTree>(e.data);
          stack = {cur->root()};
        } else {
          stack.push_back(cur->add_child(stack.back(), e.data));
        }
        break;
      case Event::Kind::Text:
        cur->set_text(stack.back(), cur->node(stack.back()).text + e.data);
        break;
      case Event::Kind::Close:
        stack.pop_back();
        if (stack.empty()) {
          forest.push_back(cur);
          cur.reset();
        }
        break;
      case Event::Kind::Boundary:
        break;
      case Event::Kind::End:
        return forest;
      case Event::Kind::Error:
        throw StreamError(e.data);
    }
  }
}

std::string serialize_forest(const std::vector<XTreePtr>& forest) {
  std::string out;
  for (const auto& t : forest) t->serialize(t->root(), out);
  return out;
}

}  // namespace xfed

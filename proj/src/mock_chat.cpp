#include "demod/mock_chat.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace demod {

using nlohmann::json;

namespace {

std::optional<ErrorCode> error_from_string(const std::string& name) {
  for (auto code : {ErrorCode::Transport, ErrorCode::Overloaded,
                    ErrorCode::Refusal}) {
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace

ScriptedChat::ScriptedChat(std::vector<Entry> entries) {
  for (auto& e : entries) add(std::move(e));
}

std::shared_ptr<ScriptedChat> ScriptedChat::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "cannot open script " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument,
                "bad script " + path.string() + ": " + e.what());
  }
  auto chat = std::make_shared<ScriptedChat>();
  for (const auto& item : doc) {
    Entry e;
    e.tag = item.value("tag", "");
    e.needle = item.value("contains", "");
    if (item.contains("responses")) {
      e.responses = item.at("responses").get<std::vector<std::string>>();
    } else if (item.contains("response")) {
      e.responses.push_back(item.at("response").get<std::string>());
    }
    if (item.contains("error")) {
      e.error = error_from_string(item.at("error").get<std::string>());
      if (!e.error) {
        throw Error(ErrorCode::InvalidArgument, "unknown scripted error kind");
      }
    }
    chat->add(std::move(e));
  }
  return chat;
}

void ScriptedChat::add(Entry entry) {
  std::lock_guard lock(mu_);
  slots_.push_back({std::move(entry), 0});
}

void ScriptedChat::add(std::string tag, std::string needle, std::string response) {
  add(Entry{std::move(tag), std::move(needle), {std::move(response)}, std::nullopt});
}

std::string ScriptedChat::complete(const ChatRequest& request) {
  validate(request);
  std::lock_guard lock(mu_);
  log_.push_back(request);
  for (auto& slot : slots_) {
    const auto& e = slot.entry;
    if (!e.tag.empty() && e.tag != request.tag) continue;
    if (!e.needle.empty() && request.subject.find(e.needle) == std::string::npos &&
        request.user_text.find(e.needle) == std::string::npos) {
      continue;
    }
    if (e.error) {
      throw Error(*e.error, "scripted " + std::string(to_string(*e.error)));
    }
    if (e.responses.empty()) break;
    const auto i = std::min(slot.served, e.responses.size() - 1);
    ++slot.served;
    return e.responses[i];
  }
  throw Error(ErrorCode::Refusal, "no scripted response for tag '" + request.tag + "'");
}

std::vector<ChatRequest> ScriptedChat::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t ScriptedChat::call_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

RuleBasedChat::RuleBasedChat(std::shared_ptr<const LexiconClassifier> classifier,
                             std::unordered_map<std::string, std::string> synonyms,
                             bool detoxify,
                             std::shared_ptr<const Tokenizer> tokenizer)
    : classifier_(std::move(classifier)),
      synonyms_(std::move(synonyms)),
      detoxify_(detoxify),
      tokenizer_(tokenizer ? std::move(tokenizer)
                           : std::make_shared<DefaultTokenizer>()) {}

std::unordered_map<std::string, std::string> RuleBasedChat::load_synonyms(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot open synonym file " + path.string());
  }
  std::unordered_map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ": expected toxic<TAB>replacement");
    }
    out[ascii_lower(line.substr(0, tab))] = line.substr(tab + 1);
  }
  return out;
}

std::string RuleBasedChat::detoxify(std::string_view text) const {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& t : tokenizer_->tokenize(text)) {
    const auto it = synonyms_.find(ascii_lower(t.text));
    if (it == synonyms_.end()) continue;
    out.append(text.substr(cursor, t.span.begin - cursor));
    out += it->second;
    cursor = t.span.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string RuleBasedChat::complete(const ChatRequest& request) {
  validate(request);
  const std::string& text = request.subject;
  if (text.empty()) throw Error(ErrorCode::Refusal, "nothing to respond to");

  if (request.tag == "detect") {
    const auto score = classifier_->classify(text);
    json out;
    json keywords = json::array();
    std::set<std::string> seen;
    if (score.label == Verdict::Toxic) {
      for (const auto& t : tokenizer_->tokenize(text)) {
        if (classifier_->weight(t.text) > 0.0 && seen.insert(t.text).second) {
          keywords.push_back(t.text);
        }
      }
    }
    out["verdict"] = score.label == Verdict::Toxic ? "Y" : "N";
    out["keywords"] = keywords;
    if (score.label == Verdict::Toxic) {
      std::string words;
      for (const auto& k : keywords) {
        if (!words.empty()) words += ", ";
        words += "'" + k.get<std::string>() + "'";
      }
      out["explanation"] =
          "This post contains insulting or derogatory words (" + words +
          ") that attack others and can hurt readers.";
    } else {
      out["explanation"] = "No insulting or derogatory language was found.";
    }
    return out.dump();
  }
  if (request.tag == "modify") {
    return json{{"revision", detoxify_ ? detoxify(text) : std::string(text)}}.dump();
  }
  if (request.tag == "simulate") {
    const auto score = classifier_->classify(text);
    const std::string reply =
        score.label == Verdict::Toxic
            ? "Honestly, this comes across as hurtful. I would not like to see "
              "you post something like this."
            : "Looks fine to me, thanks for sharing.";
    return json{{"reply", reply}}.dump();
  }
  throw Error(ErrorCode::Refusal, "unsupported request tag '" + request.tag + "'");
}

}  // namespace demod

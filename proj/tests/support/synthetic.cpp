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

#include "synthetic.hpp"

#include <array>
#include <random>
#include <string_view>

namespace ragforge::testing {

namespace {

constexpr std::array<std::string_view, 36> kFieldsEn = {
    "Mathematics in Data Science", "Aerospace", "Management", "Informatics", "Electrical Engineering",
    "Mechanical Engineering", "Chemistry", "Physics", "Biomedical Engineering", "Civil Engineering",
    "Architecture", "Materials Science", "Robotics", "Computational Science", "Environmental Engineering",
    "Food Technology", "Molecular Biotechnology", "Sports Science", "Urban Planning", "Geodesy",
    "Agricultural Sciences", "Brewing and Beverage Technology", "Finance and Information Management",
    "Industrial Chemistry", "Medical Physics", "Quantum Science", "Automotive Engineering", "Energy Systems",
    "Transportation Systems", "Consumer Science", "Forest Science", "Nutrition", "Games Engineering",
    "Neuroengineering", "Bioinformatics", "Philosophy of Technology"};

constexpr std::array<std::string_view, 36> kFieldsDe = {
    "Mathematik in den Datenwissenschaften", "Luft- und Raumfahrt", "Management", "Informatik", "Elektrotechnik",
    "Maschinenwesen", "Chemie", "Physik", "Medizintechnik", "Bauingenieurwesen", "Architektur",
    "Materialwissenschaften", "Robotik", "Computational Science", "Umweltingenieurwesen", "Lebensmitteltechnologie",
    "Molekulare Biotechnologie", "Sportwissenschaft", "Stadtplanung", "Geodäsie", "Agrarwissenschaften",
    "Brauwesen und Getränketechnologie", "Finanz- und Informationsmanagement", "Technische Chemie",
    "Medizinische Physik", "Quantenwissenschaften", "Fahrzeugtechnik", "Energiesysteme", "Verkehrssysteme",
    "Verbraucherwissenschaften", "Forstwissenschaft", "Ernährungswissenschaft", "Games Engineering",
    "Neurotechnik", "Bioinformatik", "Technikphilosophie"};

struct Topic {
    std::string_view id;
    std::string_view title_en;
    std::string_view title_de;
    std::size_t max_sentences;
};

constexpr std::array<Topic, 8> kTopics = {{
    {"costs", "Costs", "Kosten", 6},
    {"admission", "Admission Requirements", "Zulassungsvoraussetzungen", 12},
    {"language", "Language Proficiency", "Sprachkenntnisse", 5},
    {"type", "Type of Study", "Studienform", 4},
    {"deadline", "Application Deadline", "Bewerbungsfrist", 3},
    {"overview", "Program Overview", "Studiengangsübersicht", 40},
    {"career", "Career Prospects", "Berufsaussichten", 10},
    {"duration", "Standard Duration", "Regelstudienzeit", 2},
}};

// {N} name, {F} fee, {M} month, {C} credits, {S} semesters, {L} language level
const std::array<std::vector<std::string_view>, 8> kSentencesEn = {{
    {"The {N} program charges no tuition fees for students from the EU.",
     "International students from non-EU countries pay {F} euros per semester for {N}.",
     "Every student pays a semester contribution of 152 euros to the student union.",
     "The semester ticket for public transport is included in the contribution.",
     "Living costs in Munich are estimated at about 1,100 euros per month.",
     "Scholarships can reduce the costs of studying {N}."},
    {"Admission to {N} requires a qualified bachelor's degree in a related field.",
     "Applicants must submit a transcript of records and a curriculum vitae.",
     "A two-stage aptitude assessment decides on admission to {N}.",
     "In the first stage the written documents are scored on a 100-point scale.",
     "Applicants with at least 70 points are admitted directly.",
     "Applicants between 55 and 69 points are invited to a selection interview.",
     "The interview takes about 20 minutes and covers subject-specific questions.",
     "Missing credits of up to 30 ECTS can be made up during the first year.",
     "Degrees from outside the EU must be certified by uni-assist.",
     "A letter of motivation of at most two pages is required.",
     "Work experience is not mandatory but is taken into account.",
     "The GRE is recommended for applicants with foreign degrees."},
    {"Courses in {N} are taught in {L}.",
     "Applicants must prove English proficiency at level C1 of the CEFR.",
     "Accepted certificates include TOEFL with at least 88 points and IELTS with at least 6.5.",
     "German skills are not required for admission but help in daily life.",
     "Free German courses are offered by the language center."},
    {"{N} is a full-time consecutive program.",
     "Part-time study is possible on request.",
     "The program starts in the winter semester only.",
     "{N} is offered at the main campus."},
    {"The application period for {N} runs from {M} 1 to {M} 31.",
     "Late applications cannot be considered.",
     "Applications are submitted through the online portal TUMonline."},
    {"{N} combines fundamental courses with specialised electives.",
     "Students take core modules in the first two semesters.",
     "The elective catalogue covers theory, methods and applications.",
     "Project work in small teams is an integral part of {N}.",
     "Many modules are taught jointly with industry partners.",
     "Students can spend one semester abroad at a partner university.",
     "The master's thesis is written in the final semester.",
     "Research internships of eight weeks are part of the curriculum.",
     "Seminars train scientific writing and presentation skills.",
     "A mentoring program supports students during their first year.",
     "Laboratory courses give hands-on experience with modern equipment.",
     "The interdisciplinary module connects {N} with neighbouring disciplines.",
     "Students may choose a minor from the faculty's catalogue.",
     "Module examinations are held at the end of each semester.",
     "Grades are awarded on a scale from 1.0 to 5.0."},
    {"Graduates of {N} work in research, industry and consulting.",
     "Typical employers include automotive companies and software firms.",
     "Many graduates continue with a doctoral degree.",
     "The career service offers workshops on applications and interviews.",
     "Alumni report short job searches after graduation."},
    {"The standard duration of {N} is {S} semesters.",
     "Students earn {C} ECTS credits in total."},
}};

const std::array<std::vector<std::string_view>, 8> kSentencesDe = {{
    {"Für den Studiengang {N} fallen für Studierende aus der EU keine Studiengebühren an.",
     "Internationale Studierende aus Nicht-EU-Staaten zahlen {F} Euro pro Semester für {N}.",
     "Alle Studierenden zahlen einen Semesterbeitrag von 152 Euro an das Studierendenwerk.",
     "Das Semesterticket für den öffentlichen Nahverkehr ist im Beitrag enthalten.",
     "Die Lebenshaltungskosten in München liegen bei etwa 1.100 Euro im Monat.",
     "Stipendien können die Kosten für das Studium in {N} senken."},
    {"Für die Zulassung zu {N} ist ein qualifizierter Bachelorabschluss in einem verwandten Fach erforderlich.",
     "Bewerberinnen und Bewerber reichen ein Notenblatt und einen Lebenslauf ein.",
     "Ein zweistufiges Eignungsverfahren entscheidet über die Zulassung zu {N}.",
     "In der ersten Stufe werden die schriftlichen Unterlagen mit bis zu 100 Punkten bewertet.",
     "Wer mindestens 70 Punkte erreicht, wird direkt zugelassen.",
     "Wer zwischen 55 und 69 Punkten liegt, wird zu einem Auswahlgespräch eingeladen.",
     "Das Gespräch dauert etwa 20 Minuten und behandelt fachspezifische Fragen.",
     "Fehlende Leistungen von bis zu 30 ECTS können im ersten Jahr nachgeholt werden.",
     "Abschlüsse von außerhalb der EU müssen über uni-assist beglaubigt werden.",
     "Ein Motivationsschreiben von höchstens zwei Seiten ist erforderlich.",
     "Berufserfahrung ist nicht verpflichtend, wird aber berücksichtigt.",
     "Für ausländische Abschlüsse wird der GRE empfohlen."},
    {"Die Lehrveranstaltungen in {N} finden auf {L} statt.",
     "Englischkenntnisse auf Niveau C1 des GER müssen nachgewiesen werden.",
     "Anerkannt werden TOEFL mit mindestens 88 Punkten und IELTS mit mindestens 6,5.",
     "Deutschkenntnisse sind für die Zulassung nicht nötig, helfen aber im Alltag.",
     "Das Sprachenzentrum bietet kostenlose Deutschkurse an."},
    {"{N} ist ein konsekutiver Vollzeitstudiengang.",
     "Ein Teilzeitstudium ist auf Antrag möglich.",
     "Der Studienbeginn ist nur zum Wintersemester möglich.",
     "{N} wird am Hauptcampus angeboten."},
    {"Die Bewerbungsfrist für {N} läuft vom 1. bis 31. {M}.",
     "Verspätete Bewerbungen werden nicht berücksichtigt.",
     "Bewerbungen werden über das Onlineportal TUMonline eingereicht."},
    {"{N} verbindet Grundlagenveranstaltungen mit spezialisierten Wahlfächern.",
     "In den ersten beiden Semestern belegen Studierende die Kernmodule.",
     "Der Wahlkatalog umfasst Theorie, Methoden und Anwendungen.",
     "Projektarbeit in kleinen Teams ist fester Bestandteil von {N}.",
     "Viele Module werden gemeinsam mit Industriepartnern angeboten.",
     "Ein Auslandssemester an einer Partneruniversität ist möglich.",
     "Die Masterarbeit wird im letzten Semester geschrieben.",
     "Forschungspraktika von acht Wochen sind Teil des Curriculums.",
     "Seminare trainieren wissenschaftliches Schreiben und Präsentieren.",
     "Ein Mentoringprogramm begleitet Studierende im ersten Jahr.",
     "Laborpraktika vermitteln praktische Erfahrung mit moderner Ausstattung.",
     "Das interdisziplinäre Modul verbindet {N} mit benachbarten Fächern.",
     "Studierende können ein Nebenfach aus dem Katalog der Fakultät wählen.",
     "Modulprüfungen finden am Ende jedes Semesters statt.",
     "Noten werden auf einer Skala von 1,0 bis 5,0 vergeben."},
    {"Absolventinnen und Absolventen von {N} arbeiten in Forschung, Industrie und Beratung.",
     "Typische Arbeitgeber sind Automobilhersteller und Softwarefirmen.",
     "Viele schließen eine Promotion an.",
     "Der Career Service bietet Workshops zu Bewerbungen und Vorstellungsgesprächen an.",
     "Ehemalige berichten von kurzen Jobsuchen nach dem Abschluss."},
    {"Die Regelstudienzeit von {N} beträgt {S} Semester.",
     "Insgesamt werden {C} ECTS-Punkte erworben."},
}};

constexpr std::array<std::string_view, 12> kMonthsEn = {"January", "February", "March",     "April",
                                                        "May",     "June",     "July",      "August",
                                                        "September", "October", "November", "December"};
constexpr std::array<std::string_view, 12> kMonthsDe = {"Januar", "Februar", "März",      "April",
                                                        "Mai",    "Juni",    "Juli",      "August",
                                                        "September", "Oktober", "November", "Dezember"};

std::string slug(std::string_view name) {
    std::string out;
    for (const char c : name) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out += c;
        } else if (c >= 'A' && c <= 'Z') {
            out += static_cast<char>(c - 'A' + 'a');
        } else if (!out.empty() && out.back() != '-') {
            out += '-';
        }
    }
    while (!out.empty() && out.back() == '-') {
        out.pop_back();
    }
    return out;
}

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
        text.replace(pos, key.size(), value);
    }
    return text;
}

struct ProgramFacts {
    std::string fee;
    std::size_t month = 0;
    std::string credits;
    std::string semesters;
    bool english_taught = true;
    std::array<std::size_t, 8> sentence_counts{};
    bool long_token = false;
};

std::string long_token(std::mt19937_64& rng) {
    // A URL-like token longer than one parent window.
    std::string out = "https://www.example-university.de/";
    while (out.size() < 1700) {
        out += "studies/degree-programs/detail/";
        out += std::to_string(rng() % 100000);
        out += "-";
    }
    return out;
}

std::string body(const std::vector<std::string_view>& pool, std::size_t count, const std::string& name,
                 const ProgramFacts& facts, bool german, std::mt19937_64& rng) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        std::string sentence(pool[i % pool.size()]);
        sentence = replace_all(sentence, "{N}", name);
        sentence = replace_all(sentence, "{F}", facts.fee);
        sentence = replace_all(sentence, "{M}", german ? kMonthsDe[facts.month] : kMonthsEn[facts.month]);
        sentence = replace_all(sentence, "{C}", facts.credits);
        sentence = replace_all(sentence, "{S}", facts.semesters);
        sentence = replace_all(sentence, "{L}",
                               facts.english_taught ? (german ? "Englisch" : "English")
                                                    : (german ? "Deutsch und Englisch" : "German and English"));
        if (!out.empty()) {
            // Paragraph breaks every few sentences keep some newlines in the text.
            out += (i % 5 == 0) ? "\n\n" : " ";
        }
        out += sentence;
    }
    if (facts.long_token && rng() % 2 == 0) {
        out += " More information: " + long_token(rng);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& topic_titles_en() {
    static const std::vector<std::string> titles = [] {
        std::vector<std::string> out;
        for (const auto& topic : kTopics) {
            out.emplace_back(topic.title_en);
        }
        return out;
    }();
    return titles;
}

Corpus synthetic_corpus(const SyntheticOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::vector<StudyProgramDoc> docs;
    for (std::size_t p = 0; p < options.programs; ++p) {
        const std::size_t field = p % kFieldsEn.size();
        const bool master = (p / kFieldsEn.size()) % 2 == 0;
        const std::size_t round = p / (2 * kFieldsEn.size());
        std::string suffix_en = master ? " Master of Science (M.Sc.)" : " Bachelor of Science (B.Sc.)";
        std::string suffix_de = master ? " Master of Science (M.Sc.)" : " Bachelor of Science (B.Sc.)";
        if (round > 0) {
            suffix_en += " " + std::to_string(round + 1);
            suffix_de += " " + std::to_string(round + 1);
        }
        const std::string name_en = std::string(kFieldsEn[field]) + suffix_en;
        const std::string name_de = std::string(kFieldsDe[field]) + suffix_de;
        const std::string base_id = slug(std::string(kFieldsEn[field]) + (master ? " msc" : " bsc")) +
                                    (round > 0 ? "-" + std::to_string(round + 1) : "");

        ProgramFacts facts;
        facts.fee = std::to_string(2000 + 500 * (rng() % 5));
        facts.month = rng() % 12;
        facts.credits = master ? "120" : "180";
        facts.semesters = master ? "4" : "6";
        facts.english_taught = rng() % 2 == 0;
        facts.long_token = p % 9 == 4;
        for (std::size_t t = 0; t < kTopics.size(); ++t) {
            facts.sentence_counts[t] = 1 + rng() % kTopics[t].max_sentences;
        }

        for (const bool german : {false, true}) {
            StudyProgramDoc doc;
            doc.program_id = base_id + (german ? "-de" : "-en");
            doc.name = german ? name_de : name_en;
            doc.language = german ? Language::de : Language::en;
            std::mt19937_64 body_rng(options.seed ^ (p * 0x9E3779B97F4A7C15ULL));
            for (std::size_t t = 0; t < kTopics.size(); ++t) {
                const auto& pool = german ? kSentencesDe[t] : kSentencesEn[t];
                doc.sections.push_back({std::string(kTopics[t].id),
                                        std::string(german ? kTopics[t].title_de : kTopics[t].title_en),
                                        body(pool, facts.sentence_counts[t], doc.name, facts, german, body_rng)});
            }
            docs.push_back(std::move(doc));
        }
    }
    return Corpus(std::move(docs));
}

namespace {

constexpr std::array<std::string_view, 8> kQuestionsEn = {
    "How much does {N} cost for international students?",
    "What are the admission requirements for {N}?",
    "Which language certificates do I need for {N}?",
    "Can I study {N} part-time?",
    "When is the application deadline for {N}?",
    "What do I learn in {N}?",
    "What career prospects do graduates of {N} have?",
    "How long does {N} take?",
};

constexpr std::array<std::string_view, 8> kQuestionsDe = {
    "Wie viel kostet {N} für internationale Studierende?",
    "Welche Zulassungsvoraussetzungen gelten für {N}?",
    "Welche Sprachnachweise brauche ich für {N}?",
    "Kann ich {N} in Teilzeit studieren?",
    "Wann ist die Bewerbungsfrist für {N}?",
    "Was lerne ich in {N}?",
    "Welche Berufsaussichten haben Absolventen von {N}?",
    "Wie lange dauert {N}?",
};

std::string first_sentence_of(const std::string& text) {
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if ((text[i] == '.' || text[i] == '!' || text[i] == '?') && (text[i + 1] == ' ' || text[i + 1] == '\n')) {
            return text.substr(0, i + 1);
        }
    }
    return text;
}

}  // namespace

std::vector<QAItem> synthetic_qa(const Corpus& corpus, std::size_t per_language, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<QAItem> out;
    for (const auto language : {Language::en, Language::de}) {
        const auto subset = corpus.filter(language);
        if (subset.empty()) {
            continue;
        }
        for (std::size_t i = 0; i < per_language; ++i) {
            const auto& program = subset.programs()[rng() % subset.size()];
            const std::size_t t = rng() % program.sections.size();
            const auto& section = program.sections[t];
            const auto& templates = language == Language::de ? kQuestionsDe : kQuestionsEn;
            QAItem item;
            item.qa_id = std::string(to_string(language)) + "-" + (i < 9 ? "00" : i < 99 ? "0" : "") +
                         std::to_string(i + 1);
            item.question = replace_all(std::string(templates[t % templates.size()]), "{N}", program.name);
            item.reference_answer = first_sentence_of(section.body);
            item.gold_program_id = program.program_id;
            item.gold_topic_id = section.topic_id;
            item.language = language;
            out.push_back(std::move(item));
        }
    }
    return out;
}

}  // namespace ragforge::testing

#!/usr/bin/env python3
# Copyright (c) 2026 The scitrace Authors. All Rights Reserved
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""Writes the replay fixtures for the offline harvest tests.

Five arXiv records over three Atom pages (page size 2) and the matching
citation batches (batch size 2). File names follow fixture_key() in
src/transport.cpp, so a change there means rerunning this script.
"""

import hashlib
import json
import pathlib

ARXIV = "http://fixture.invalid/api/query"
CITES = "http://fixture.invalid/graph/v1/paper/batch"
QUERY = "(cat:cs.DL) AND submittedDate:[202301010000 TO 202312312359]"
FIELDS = ("externalIds,references.paperId,references.externalIds,references.year,"
          "references.fieldsOfStudy")

PAPERS = [
    ("2301.00011", "Citation Graphs   of Digital\n  Libraries", "We study citation graphs of digital libraries.",
     ["cs.DL", "cs.SI"], "2023-01-05T10:00:00Z", "2023-02-01T09:30:00Z", ""),
    ("2302.00012", "Topic Drift in Preprint Archives", "Topic drift is measured with keyword embeddings.",
     ["cs.DL"], "2023-02-11T12:00:00Z", "2023-02-11T12:00:00Z", "J. Informetrics 17 (2023)"),
    ("2304.00013", "Age of Citation across Fields", "We compare citation ages across subject groups.",
     ["cs.DL", "stat.AP"], "2023-04-02T08:00:00Z", "2023-05-20T08:00:00Z", ""),
    ("2307.00014", "Community Structure of Citation Networks",
     "Louvain communities in citation networks of preprints.",
     ["physics.soc-ph", "cs.DL"], "2023-07-19T16:45:00Z", "2023-07-19T16:45:00Z", ""),
    ("2311.00015", "Interdisciplinary Reference Lists", "Reference lists mix subjects in interdisciplinary work.",
     ["cs.DL"], "2023-11-30T23:59:00Z", "2023-12-04T10:00:00Z", ""),
]

# One entry per paper id in batch order; None is a lookup miss.
CITATIONS = {
    "2301.00011": {"paperId": "s2-0011", "externalIds": {"ArXiv": "2301.00011"}, "references": [
        {"paperId": "s2-ref-a", "externalIds": {"DOI": "10.1/a"}, "year": 2019, "fieldsOfStudy": ["Computer Science"]},
        {"paperId": "s2-ref-b", "externalIds": None, "year": 2015,
         "fieldsOfStudy": ["Computer Science", "Mathematics"]},
    ]},
    "2302.00012": None,
    "2304.00013": {"paperId": "s2-0013", "externalIds": {"ArXiv": "2304.00013"}, "references": [
        {"paperId": "s2-0011", "externalIds": {"ArXiv": "2301.00011"}, "year": 2023,
         "fieldsOfStudy": ["Computer Science"]},
        {"paperId": "s2-ref-c", "externalIds": {}, "year": 2010, "fieldsOfStudy": ["Physics"]},
        {"paperId": None, "externalIds": None, "year": 2001, "fieldsOfStudy": None},
    ]},
    "2307.00014": {"paperId": "s2-0014", "externalIds": {"ArXiv": "2307.00014"}, "references": [
        {"paperId": "s2-0013", "externalIds": {"ArXiv": "2304.00013"}, "year": 2023,
         "fieldsOfStudy": ["Computer Science", "Mathematics"]},
        {"paperId": "s2-0012", "externalIds": {"ArXiv": "2302.00012"}, "year": 2023, "fieldsOfStudy": []},
    ]},
    "2311.00015": {"paperId": "s2-0015", "externalIds": {"ArXiv": "2311.00015"}, "references": [
        {"paperId": "s2-0014", "externalIds": {"ArXiv": "2307.00014"}, "year": 2023,
         "fieldsOfStudy": ["Physics"]},
        {"paperId": "s2-ref-d", "externalIds": {}, "year": None, "fieldsOfStudy": ["Biology"]},
    ]},
}

PAGE_SIZE = 2
BATCH = 2


def key(method, url, params, body):
    canonical = method + "\n" + url + "\n"
    for k, v in sorted(params):
        canonical += k + "=" + v + "&"
    canonical += "\n" + body
    return hashlib.sha256(canonical.encode()).hexdigest()


def entry(p):
    pid, title, summary, cats, published, updated, jref = p
    cat_xml = "".join(f'\n    <category term="{c}" scheme="http://arxiv.org/schemas/atom"/>' for c in cats)
    jref_xml = f"\n    <arxiv:journal_ref>{jref}</arxiv:journal_ref>" if jref else ""
    return f"""  <entry>
    <id>http://arxiv.org/abs/{pid}v2</id>
    <updated>{updated}</updated>
    <published>{published}</published>
    <title>{title}</title>
    <summary>  {summary}
    </summary>
    <author><name>A. Author</name></author>{jref_xml}
    <arxiv:primary_category term="{cats[0]}" scheme="http://arxiv.org/schemas/atom"/>{cat_xml}
  </entry>
"""


def page(start, entries):
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom" xmlns:opensearch="http://a9.com/-/spec/opensearch/1.1/" xmlns:arxiv="http://arxiv.org/schemas/atom">
  <title>arXiv Query</title>
  <opensearch:totalResults>{len(PAPERS)}</opensearch:totalResults>
  <opensearch:startIndex>{start}</opensearch:startIndex>
  <opensearch:itemsPerPage>{PAGE_SIZE}</opensearch:itemsPerPage>
""" + "".join(entry(e) for e in entries) + "</feed>\n"


def write(out, name, status, ctype, body):
    (out / (name + ".http")).write_text(f"STATUS {status}\ncontent-type: {ctype}\n\n{body}")


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "harvest"
    http = root / "http"
    http.mkdir(parents=True, exist_ok=True)
    for old in http.glob("*.http"):
        old.unlink()
    for start in range(0, len(PAPERS) + 1, PAGE_SIZE):
        params = [("search_query", QUERY), ("start", str(start)), ("max_results", str(PAGE_SIZE)),
                  ("sortBy", "submittedDate"), ("sortOrder", "ascending")]
        write(http, key("GET", ARXIV, params, ""), 200, "application/atom+xml",
              page(start, PAPERS[start:start + PAGE_SIZE]))
    ids = [p[0] for p in PAPERS]
    for at in range(0, len(ids), BATCH):
        batch = ids[at:at + BATCH]
        body = json.dumps({"ids": ["arXiv:" + i for i in batch]}, separators=(",", ":"))
        reply = json.dumps([CITATIONS[i] for i in batch], indent=1)
        write(http, key("POST", CITES, [("fields", FIELDS)], body), 200, "application/json", reply)
    # Cut off inside the second entry, as a dropped connection would leave it.
    full = page(0, PAPERS[:2])
    (root / "malformed.xml").write_text(full[:full.rindex("<summary>") + 20])


if __name__ == "__main__":
    main()

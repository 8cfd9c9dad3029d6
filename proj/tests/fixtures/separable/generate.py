"""Writes the separable end-to-end fixture: an NVD 1.1 feed whose texts carry
one distinctive phrase per CVSS component value, plus an offline advisory
site with extractor config. Base scores come from the `cvss` package.

    python3 generate.py   (run from this directory)
"""
import itertools
import json
import os
import random

from cvss import CVSS3

SEED = 20210901
N_CVES = 400
N_PAGES = 140

PHRASES = {
    "AV": {"N": "remotely over the internet", "A": "from an adjacent segment",
           "L": "with a local shell", "P": "with physical hardware possession"},
    "AC": {"L": "trivially", "H": "only after winning a race"},
    "PR": {"N": "without authentication", "L": "as a low privileged account",
           "H": "requiring administrator rights"},
    "UI": {"N": "with no victim involvement", "R": "once a victim clicks a crafted link"},
    "S": {"U": "inside the vulnerable component", "C": "escaping the sandbox into other components"},
    "C": {"N": "leaks nothing", "L": "partially reveals filenames", "H": "exposes stored credentials"},
    "I": {"N": "alters nothing", "L": "modifies some log entries", "H": "overwrites arbitrary files"},
    "A": {"N": "causes no downtime", "L": "degrades performance", "H": "crashes the daemon entirely"},
}
ORDER = ["AV", "AC", "PR", "UI", "S", "C", "I", "A"]
PRODUCTS = ["Acme Router", "Foobar CMS", "Zeta Mail", "Orbit VPN", "Quill Editor", "Nimbus Cloud Agent",
            "Helix PDF", "Vega Camera", "Polar DB", "Lumen Gateway"]
FLAWS = ["a buffer overflow in the parser", "an injection flaw in the admin form",
         "a use after free in the renderer", "an improper check in the update service",
         "a path traversal in the file handler", "an integer overflow in the decoder"]


def description(rng, cve, vec, variant):
    p = {k: PHRASES[k][vec[k]] for k in ORDER}
    prod = rng.choice(PRODUCTS)
    ver = f"{rng.randint(1, 9)}.{rng.randint(0, 20)}.{rng.randint(0, 9)}"
    flaw = rng.choice(FLAWS)
    if variant == 0:
        return (f"{prod} before {ver} contains {flaw}. An attacker can exploit it {p['AV']}, "
                f"{p['AC']}, {p['PR']} and {p['UI']}. The effect stays {p['S']}; "
                f"exploitation {p['C']}, {p['I']} and {p['A']}.")
    return (f"Advisory for {cve}: {flaw} affects {prod} {ver}. Exploitation happens {p['AV']} "
            f"and works {p['AC']} {p['PR']}, {p['UI']}. Scope: {p['S']}. "
            f"Impact: it {p['C']}, {p['I']}, and {p['A']}. Update to the fixed release.")


def main():
    rng = random.Random(SEED)
    all_vectors = [dict(zip(ORDER, combo)) for combo in itertools.product(
        *[list(PHRASES[k].keys()) for k in ORDER])]
    items, pages, page_entries = [], {}, []
    page_ids = set(rng.sample(range(N_CVES), N_PAGES))
    for n in range(N_CVES):
        cve = f"CVE-2021-{40000 + n}"
        vec = rng.choice(all_vectors)
        vs = "CVSS:3.1/" + "/".join(f"{k}:{vec[k]}" for k in ORDER)
        score = CVSS3(vs).scores()[0]
        refs = [{"url": f"https://github.com/example/project{n}/issues/{n % 97}", "name": "x",
                 "refsource": "MISC", "tags": ["Issue Tracking"]}]
        if n in page_ids:
            url = f"https://advisories.example/adv/{cve}.html"
            if n % 35 == 0:
                url = f"https://advisories.example/drafts/{cve}.html"  # denied by robots
            refs.append({"url": url, "name": url, "refsource": "MISC", "tags": ["Third Party Advisory"]})
            if n % 35 != 0 and n % 23 != 0:  # every 23rd page is missing (404)
                fname = f"{cve}.html"
                body = description(rng, cve, vec, 1)
                pages[fname] = (
                    "<!DOCTYPE html>\n<html><head><title>" + cve + "</title></head><body>\n"
                    "<nav><a href=\"/\">Home</a> <a href=\"/adv/\">All advisories</a></nav>\n"
                    "<article class=\"advisory\">\n  <h1>" + cve + "</h1>\n"
                    "  <div class=\"summary\"><p>" + body + "</p></div>\n"
                    "  <div class=\"meta\"><p>Vector: " + vs + "</p></div>\n"
                    "</article>\n<footer><p>Subscribe to the advisory mailing list.</p></footer>\n"
                    "</body></html>\n")
                page_entries.append({"url": url, "file": "pages/" + fname, "status": 200,
                                     "latency_secs": 0.5})
        items.append({
            "cve": {"data_type": "CVE", "data_format": "MITRE", "data_version": "4.0",
                    "CVE_data_meta": {"ID": cve, "ASSIGNER": "cve@mitre.org"},
                    "problemtype": {"problemtype_data": [{"description": []}]},
                    "references": {"reference_data": refs},
                    "description": {"description_data": [
                        {"lang": "en", "value": description(rng, cve, vec, 0)}]}},
            "configurations": {"CVE_data_version": "4.0", "nodes": []},
            "impact": {"baseMetricV3": {"cvssV3": {"version": "3.1", "vectorString": vs,
                                                   "baseScore": float(score)},
                                        "exploitabilityScore": 0, "impactScore": 0}},
            "publishedDate": f"2021-{1 + n % 12:02d}-{1 + n % 28:02d}T10:15Z",
            "lastModifiedDate": "2021-12-01T10:15Z",
        })
    feed = {"CVE_data_type": "CVE", "CVE_data_format": "MITRE", "CVE_data_version": "4.0",
            "CVE_data_numberOfCVEs": str(len(items)), "CVE_data_timestamp": "2021-12-31T07:00Z",
            "CVE_Items": items}
    with open("feed.json", "w") as f:
        json.dump(feed, f, indent=1)
        f.write("\n")
    os.makedirs("site/pages", exist_ok=True)
    os.makedirs("site/robots", exist_ok=True)
    for fname, html in pages.items():
        with open(os.path.join("site/pages", fname), "w") as f:
            f.write(html)
    with open("site/pages.json", "w") as f:
        json.dump({"pages": page_entries}, f, indent=1)
        f.write("\n")
    with open("site/robots/advisories.example.txt", "w") as f:
        f.write("User-agent: *\nCrawl-delay: 1\nDisallow: /drafts/\n")


if __name__ == "__main__":
    main()

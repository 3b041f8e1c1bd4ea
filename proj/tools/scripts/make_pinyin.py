#!/usr/bin/env python3
"""Builds the toneless pinyin table for every CJK character in the given files.

Requires the `pypinyin` package (offline step only; the output is committed).
Usage: make_pinyin.py data/corpus/*.txt data/shape.tsv > data/pinyin.tsv
"""
import sys

from pypinyin import Style, pinyin


def main():
    chars = set()
    for path in sys.argv[1:]:
        with open(path, encoding="utf-8") as f:
            for ch in f.read():
                if "一" <= ch <= "鿿":
                    chars.add(ch)
    for ch in sorted(chars):
        syllables = []
        for s in pinyin(ch, style=Style.NORMAL, heteronym=True)[0]:
            s = s.replace("ü", "v")
            if s not in syllables:
                syllables.append(s)
        print(f"{ch}\t{','.join(syllables)}")


if __name__ == "__main__":
    main()

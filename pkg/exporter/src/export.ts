/**
 * Export job: read a cleaned-sentence TSV (`id<TAB>text` per line), run
 * the encoder in batches, and write one EMB1 record per input line in
 * file order. No text cleaning happens here; the pipeline's sentence
 * export is the single source of truth for preprocessing.
 */

import { readFile, writeFile } from 'node:fs/promises';

import { loadEncoder } from './encoder.js';
import { encodeEmb1, type Emb1Record } from './emb1.js';

export class InputError extends Error {}
export class IdCollisionError extends Error {}
export class WriteError extends Error {}

export interface ExportJob {
    input: string;
    model: string;
    batch: number;
    out: string;
}

export interface SentenceLine {
    id: string;
    text: string;
}

export function parseSentenceTsv(content: string, source: string): SentenceLine[] {
    const lines: SentenceLine[] = [];
    const seen = new Set<string>();
    content.split('\n').forEach((line, index) => {
        if (!line.trim()) return;
        const tab = line.indexOf('\t');
        if (tab <= 0) {
            throw new InputError(`${source}:${index + 1}: expected id<TAB>text`);
        }
        const id = line.slice(0, tab).trim();
        const text = line.slice(tab + 1).trim();
        if (!id || !text) {
            throw new InputError(`${source}:${index + 1}: empty id or text`);
        }
        if (seen.has(id)) {
            throw new IdCollisionError(`${source}:${index + 1}: duplicate id ${id}`);
        }
        seen.add(id);
        lines.push({ id, text });
    });
    return lines;
}

export interface ExportResult {
    count: number;
    dim: number;
    out: string;
}

export async function exportEmbeddings(job: ExportJob): Promise<ExportResult> {
    if (!Number.isInteger(job.batch) || job.batch < 1) {
        throw new InputError(`batch size must be a positive integer, got ${job.batch}`);
    }
    let content: string;
    try {
        content = await readFile(job.input, 'utf-8');
    } catch (err) {
        throw new InputError(`cannot read ${job.input}: ${(err as Error).message}`);
    }
    const sentences = parseSentenceTsv(content, job.input);
    const encoder = await loadEncoder(job.model);

    const records: Emb1Record[] = [];
    for (let start = 0; start < sentences.length; start += job.batch) {
        const slice = sentences.slice(start, start + job.batch);
        const vectors = await encoder.encode(slice.map((s) => s.text));
        slice.forEach((s, i) => records.push({ id: s.id, vector: vectors[i] }));
    }

    const payload = encodeEmb1(encoder.dim, records);
    try {
        await writeFile(job.out, payload);
    } catch (err) {
        throw new WriteError(`cannot write ${job.out}: ${(err as Error).message}`);
    }
    return { count: records.length, dim: encoder.dim, out: job.out };
}

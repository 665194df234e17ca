/**
 * Sentence-encoder backends.
 *
 * `loadEncoder` understands two model name forms:
 *   - "stub:<dim>" — a deterministic local test encoder, no downloads;
 *   - anything else — a feature-extraction pipeline resolved through
 *     @huggingface/transformers (downloaded or cached), mean-pooled.
 */

export interface Encoder {
    readonly name: string;
    readonly dim: number;
    encode(texts: string[]): Promise<number[][]>;
}

export class ModelLoadError extends Error {}

/** FNV-1a over UTF-8, then a splitmix-style stream; values in [-1, 1). */
function stubVector(text: string, dim: number): number[] {
    let h = 0xcbf29ce484222325n;
    for (const byte of Buffer.from(text, 'utf-8')) {
        h ^= BigInt(byte);
        h = (h * 0x100000001b3n) & 0xffffffffffffffffn;
    }
    const out: number[] = [];
    for (let i = 1; i <= dim; i++) {
        let z = (h + BigInt(i) * 0x9e3779b97f4a7c15n) & 0xffffffffffffffffn;
        z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & 0xffffffffffffffffn;
        z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & 0xffffffffffffffffn;
        z = z ^ (z >> 31n);
        out.push(2 * Number(z >> 11n) / 2 ** 53 - 1);
    }
    return out;
}

class StubEncoder implements Encoder {
    readonly name: string;
    readonly dim: number;

    constructor(dim: number) {
        if (!Number.isInteger(dim) || dim < 2) {
            throw new ModelLoadError(`stub dimension must be an integer >= 2, got ${dim}`);
        }
        this.name = `stub:${dim}`;
        this.dim = dim;
    }

    async encode(texts: string[]): Promise<number[][]> {
        return texts.map((t) => stubVector(t, this.dim));
    }
}

class TransformersEncoder implements Encoder {
    readonly name: string;
    readonly dim: number;
    private readonly pipe: (
        texts: string[],
        options: { pooling: string; normalize: boolean },
    ) => Promise<{ data: Float32Array; dims: number[] }>;

    private constructor(name: string, dim: number, pipe: TransformersEncoder['pipe']) {
        this.name = name;
        this.dim = dim;
        this.pipe = pipe;
    }

    static async load(model: string): Promise<TransformersEncoder> {
        let pipelineFactory;
        try {
            ({ pipeline: pipelineFactory } = await import('@huggingface/transformers'));
        } catch (err) {
            throw new ModelLoadError(
                `@huggingface/transformers is not installed; run "npm install @huggingface/transformers" ` +
                    `or use a stub:<dim> model (${(err as Error).message})`,
            );
        }
        let pipe;
        try {
            pipe = await pipelineFactory('feature-extraction', model);
        } catch (err) {
            throw new ModelLoadError(`failed to load model ${model}: ${(err as Error).message}`);
        }
        const probe = await pipe(['dimension probe'], { pooling: 'mean', normalize: false });
        const dim = probe.dims[probe.dims.length - 1];
        return new TransformersEncoder(model, dim, pipe);
    }

    async encode(texts: string[]): Promise<number[][]> {
        const output = await this.pipe(texts, { pooling: 'mean', normalize: false });
        const dim = output.dims[output.dims.length - 1];
        if (dim !== this.dim) {
            throw new ModelLoadError(`model emitted dim ${dim}, expected ${this.dim}`);
        }
        const rows: number[][] = [];
        for (let i = 0; i < texts.length; i++) {
            rows.push(Array.from(output.data.subarray(i * dim, (i + 1) * dim)));
        }
        return rows;
    }
}

export async function loadEncoder(model: string): Promise<Encoder> {
    const stub = /^stub:(\d+)$/.exec(model);
    if (stub) {
        return new StubEncoder(Number(stub[1]));
    }
    return TransformersEncoder.load(model);
}

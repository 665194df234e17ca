// Minimal surface of the optional @huggingface/transformers dependency;
// resolved dynamically at runtime, absent in hermetic test environments.
declare module '@huggingface/transformers' {
    export interface FeatureTensor {
        data: Float32Array;
        dims: number[];
    }
    export type FeaturePipeline = (
        texts: string[],
        options: { pooling: string; normalize: boolean },
    ) => Promise<FeatureTensor>;
    export function pipeline(task: 'feature-extraction', model: string): Promise<FeaturePipeline>;
}

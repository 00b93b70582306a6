/** Wire types shared with the generation API. */
export {};

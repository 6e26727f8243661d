#pragma once

// Fixed prompt texts. These are data: keep them byte-identical, typos included.

#include <string_view>

namespace vocot::prompts {

inline constexpr std::string_view kType2System =
    R"vocot(You are an excellent generator of image QA reasoning processes based on question-answer pairs and object information represented by object bounding boxes (x_left_top, y_left_top, x_right_down, y_right_down).Your task is to generate reasoning process based on the questions and answers you are given. The reasoning process should include the reasoning path, relevant object bounding boxes, and inference clues, including but not limited to the object's number, location, and your own background knowledge. The object in your reasoning path must annotate with object bounding box. The bounding box must come from the object information given by the user, please do not detect it yourself! ! ! ! Don't mention object information directly, just annotate it with bounding boxes.When you refer to the information in prompt, the text should show that you did not know the answer in advance, but that you reasoned it out yourself. And don't directly say that something doesn't appear in the information provided. Don't mention anything in the prompt in your reply, and don't mention bounding boxes in the generated reasoning process.You will follow instructions to the best of your ability. Your response should follow the following format: {"Thought":""})vocot";

inline constexpr std::string_view kType3System =
    R"vocot(You are an excellent image describer and question-answer generator based on the image and object information which is represented by object bounding box (x_left_top, y_left_top, x_right_down , y_right_down). You have three tasks in total. Your first task is to ask a complex question that requires close inspection of the image and strong reasoning ability to answer. Your second task is to answer the question you raised solely based on the given image. Your third task is to generate the reasoning thought. The reasoning thought should contain the reasoning path, relative object bounding box and inference clue, include but are not limited to the object numbers, location and background knowledge from yourself. The bounding box must come from the user given object information, Do not detect by yourself !!!! Do not mention the object infomation directly, just annotate with bounding box. When you ask questions, try to find the most valuable information in the picture to ask about, and ask a question that is relevant to that information. When you ask questions, do not involve violence, advertisement, possible invasion of privacy, or questions that may cause discomfort. Do not mention anything from the prompt in your response and Do not mention bounding box in your generated question. You will follow the instructions to the best of your ability. Your response should follow the following format: {"question":"","answer":"","Thought":""})vocot";

// In-context exemplar shared by both generation modes.
inline constexpr std::string_view kExemplarObjectInfo =
    R"vocot([Object Info]: Coffee1: [0.04, 0.25, 0.20, 0.28], Bean: [0.22 , 0.12 , 0.29 , 0.32 ], Vegetable: [0.52, 0.11, 0.29, 0.31 ], Coffee2: [0.76, 0.25, 0.21, 0.27 ], Yam: [0.69, 0.48, 0.27, 0.34 ], Burrito: [0.34, 0.40, 0.35, 0.44 ], Orange: [0.05, 0.50, 0.27, 0.34 ], Chopsticks: [0.61, 0.69, 0.22, 0.31])vocot";

inline constexpr std::string_view kExemplarQuestion =
    "What is the food with the most Vitamin C in this image?";

inline constexpr std::string_view kExemplarAnswer = "Orange.";

inline constexpr std::string_view kExemplarImage = "figure/fruit.jpg";

inline constexpr std::string_view kType2ExemplarResponse =
    R"vocot({"thought": "From the picture, you can see two cups of coffee  [0.04, 0.25, 0.20, 0.28],[0.76, 0.25, 0.21, 0.27 ], one portion of bean[0.22 , 0.12 , 0.29 , 0.32 ], one portion of vegetables[0.34, 0.40, 0.35, 0.44 ], one portion of yam[0.69, 0.48, 0.27, 0.34 ], one burrito[0.34, 0.40, 0.35, 0.44 ], and a plate of oranges[0.05, 0.50, 0.27, 0.34 ]. Among these foods, bean[0.22 , 0.12 , 0.29 , 0.32 ] contains protein, yams[0.05, 0.50, 0.27, 0.34 ] and burrito[0.34, 0.40, 0.35, 0.44 ] are rich in starch, vegetables[0.34, 0.40, 0.35, 0.44 ], and oranges[0.05, 0.50, 0.27, 0.34 ] are foods that may contain vitamin C, but oranges[0.05, 0.50, 0.27, 0.34 ] have a higher vitamin C content, so oranges[0.05, 0.50, 0.27, 0.34 ] are foods that contain more vitamin C."})vocot";

inline constexpr std::string_view kType3ExemplarResponse =
    R"vocot({"question":"What is the food with the most Vitamin C in this image?", "answer": "Orange.", "thought": "From the picture, you can see two cups of coffee  [0.04, 0.25, 0.20, 0.28],[0.76, 0.25, 0.21, 0.27 ], one portion of bean[0.22 , 0.12 , 0.29 , 0.32 ], one portion of vegetables[0.34, 0.40, 0.35, 0.44 ], one portion of yam[0.69, 0.48, 0.27, 0.34 ], one burrito[0.34, 0.40, 0.35, 0.44 ], and a plate of oranges[0.05, 0.50, 0.27, 0.34 ]. Among these foods, bean[0.22 , 0.12 , 0.29 , 0.32 ] contains protein, yams[0.05, 0.50, 0.27, 0.34 ] and burrito[0.34, 0.40, 0.35, 0.44 ] are rich in starch, vegetables[0.34, 0.40, 0.35, 0.44 ], and oranges[0.05, 0.50, 0.27, 0.34 ] are foods that may contain vitamin C, but oranges[0.05, 0.50, 0.27, 0.34 ] have a higher vitamin C content, so oranges[0.05, 0.50, 0.27, 0.34 ] are foods that contain more vitamin C."})vocot";

inline constexpr std::string_view kCoTTrigger =
    "Answer the question and include the reasoning proess. Locate key objects and provide "
    "bounding boxes in your thoughts.";

inline constexpr std::string_view kGroundingToken = "<grounding>";

// Phrases that mark a refusal-style generation instead of a reasoning path.
inline constexpr std::string_view kErrorPatterns[] = {
    "From the object information provided",
    "provided object information",
    "From the bounding boxes provided",
};

}  // namespace vocot::prompts
